import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from qudit_metrology import (
    DensityMatrix,
    DephasingChannel,
    GeneratorDirection,
    basis_state,
    bloch_vector,
    cramer_rao,
    d_eff,
    eigendecompose,
    evolve,
    ghz_dephased,
    ghz_like,
    ghz_multiqubit,
    dicke_multiqubit,
    icosphere,
    metrological_power,
    n_eff,
    nonclassicality,
    phase_generator,
    qfi_max_collective,
    qfi_max_collective_search,
    qfi_pure,
    qfi_pure_bloch,
    qfi_report,
    qfi_sld,
    qfi_spectral,
    random_density_matrix,
    random_hermitian,
    random_pure_state,
    sld,
    spin_coherent,
    spin_operators,
    to_density,
)


def ladder_oracle(d, i):
    """2 [J(J+1) - m^2]: the Jx QFI of |J, m> from <Jx^2> = (J(J+1) - m^2)/2."""
    J = (d - 1) / 2
    m = -J + i
    return 2 * (J * (J + 1) - m * m)


def generators(d, rng):
    jx, jy, jz = spin_operators(d)
    return [jx, jy, jz, phase_generator(d), random_hermitian(d, rng)]


# --------------------------------------------------------------------------
# symmetric logarithmic derivative


def test_sld_pure_is_twice_derivative(rng):
    psi = random_pure_state(5, rng)
    rho = to_density(psi).matrix
    G = random_hermitian(5, rng).matrix
    drho = -1j * (G @ rho - rho @ G)
    npt.assert_allclose(sld(rho, drho).matrix, 2 * drho, atol=1e-10)


def test_sld_maximally_mixed_zero():
    npt.assert_array_equal(sld(DensityMatrix(np.eye(4) / 4), np.zeros((4, 4))).matrix, 0)


def test_sld_equation_rank_two(rng):
    d = 4
    rho = random_density_matrix(d, rng, rank=2).matrix
    G = spin_operators(d)[2].matrix
    drho = -1j * (G @ rho - rho @ G)
    L = sld(rho, drho).matrix
    residual = 0.5 * (rho @ L + L @ rho) - drho
    assert np.max(np.abs(residual)) < 1e-8


def test_sld_rejects_non_hermitian():
    with pytest.raises(ValueError):
        sld(DensityMatrix(np.eye(2) / 2), np.array([[0, 1], [0, 0]]))


def test_eigendecomposition_reconstructs(rng):
    rho = random_density_matrix(6, rng, rank=3)
    eig = eigendecompose(rho)
    npt.assert_allclose(eig.reconstruct(), rho.matrix, atol=1e-10)
    v = eig.eigenvectors
    npt.assert_allclose(v.conj().T @ v, np.eye(6), atol=1e-10)
    assert np.all(eig.eigenvalues >= 0)
    assert np.all(np.diff(eig.eigenvalues) >= 0)


# --------------------------------------------------------------------------
# estimator values


def test_qfi_eigenstate_is_zero():
    assert qfi_sld(to_density(basis_state(3, 0)), spin_operators(3)[2]) == pytest.approx(0, abs=1e-12)
    assert qfi_pure_bloch(basis_state(4, 2), spin_operators(4)[2]) == pytest.approx(0, abs=1e-12)


def test_qfi_ghz4_under_p():
    assert qfi_sld(to_density(ghz_like(4)), phase_generator(4)) == pytest.approx(4 * 1.5 ** 2, abs=1e-10)


def test_qfi_maximally_mixed_is_zero(rng):
    for d in (2, 5):
        assert qfi_spectral(DensityMatrix(np.eye(d) / d), random_hermitian(d, rng)) == 0


def test_qfi_spectral_pure_is_four_variance(rng):
    psi = random_pure_state(7, rng)
    A = random_hermitian(7, rng)
    a = A.matrix
    v = psi.amplitudes
    var = np.vdot(v, a @ a @ v).real - np.vdot(v, a @ v).real ** 2
    assert qfi_spectral(to_density(psi), A) == pytest.approx(4 * var, abs=1e-10)


def test_qfi_dephased_ghz_d3_two_level_oracle():
    rho = ghz_dephased(3, DephasingChannel(0.1))
    # restrict to span{|0>, |2>}: populations 1/2, coherence r/2, generator diag(0, 2)
    r = math.exp(-4 * 0.1)
    lam = np.linalg.eigvalsh(np.array([[0.5, r / 2], [r / 2, 0.5]]))
    # |<psi_-|P|psi_+>|^2 = 1 for the equal-weight eigenvectors of the 2x2 block
    oracle = 2 * 2 * (lam[1] - lam[0]) ** 2 / (lam[1] + lam[0]) * 1.0
    assert oracle == pytest.approx(4 * math.exp(-0.8), abs=1e-12)
    assert qfi_spectral(rho, phase_generator(3)) == pytest.approx(oracle, abs=1e-10)
    assert qfi_spectral(rho, phase_generator(3)) == pytest.approx(1.7973158564688863, abs=1e-10)


@pytest.mark.parametrize("d", range(2, 17))
def test_qfi_pure_dicke_ladder_oracle(d):
    jx = spin_operators(d)[0]
    for i in range(d):
        assert qfi_pure(basis_state(d, i), jx) == pytest.approx(ladder_oracle(d, i), abs=1e-10)
    assert qfi_pure(basis_state(d, 0), jx) == pytest.approx(d - 1, abs=1e-10)
    assert qfi_pure(ghz_like(d), phase_generator(d)) == pytest.approx((d - 1) ** 2, abs=1e-10)


def test_qfi_pure_spin1_midstate():
    assert qfi_pure(basis_state(3, 1), spin_operators(3)[0]) == pytest.approx(4, abs=1e-12)


def test_qfi_pure_bloch_qubit_plus_state():
    plus = ghz_like(2)
    jz = spin_operators(2)[2]
    assert qfi_pure_bloch(plus, jz) == pytest.approx(1, abs=1e-12)
    # oracle: speed of the Bloch vector along the equator by central differences
    h = 1e-5
    w1 = bloch_vector(to_density(evolve(plus, jz, h, -1)))
    w0 = bloch_vector(to_density(evolve(plus, jz, -h, -1)))
    speed2 = np.sum(((w1 - w0) / (2 * h)) ** 2)
    assert speed2 == pytest.approx(1, abs=1e-8)


def test_qfi_pure_bloch_matches_pure_d5(rng):
    psi = random_pure_state(5, rng)
    jy = spin_operators(5)[1]
    assert qfi_pure_bloch(psi, jy) == pytest.approx(qfi_pure(psi, jy), abs=1e-8)


def test_qfi_sld_matches_pure_d6(rng):
    psi = random_pure_state(6, rng)
    G = random_hermitian(6, rng)
    assert qfi_sld(to_density(psi), G) == pytest.approx(qfi_pure(psi, G), abs=1e-8)


# --------------------------------------------------------------------------
# invariants


@settings(max_examples=60, deadline=None)
@given(d=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
def test_estimators_agree_on_pure_states(d, seed):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(d, rng)
    rho = to_density(psi)
    for G in generators(d, rng):
        ref = qfi_pure(psi, G)
        for other in (qfi_sld(rho, G), qfi_spectral(rho, G), qfi_pure_bloch(psi, G)):
            assert other == pytest.approx(ref, abs=1e-8 * max(1.0, ref))


@settings(max_examples=60, deadline=None)
@given(d=st.integers(2, 8), k=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_convexity(d, k, seed):
    rng = np.random.default_rng(seed)
    states = [random_pure_state(d, rng) for _ in range(k)]
    p = rng.dirichlet(np.ones(k))
    rho = DensityMatrix(sum(pi * to_density(s).matrix for pi, s in zip(p, states)))
    for A in generators(d, rng):
        bound = sum(pi * qfi_pure(s, A) for pi, s in zip(p, states))
        assert qfi_spectral(rho, A) <= bound + 1e-8


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 8), seed=st.integers(0, 2**32 - 1))
def test_unitary_covariance(d, seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
    A = random_hermitian(d, rng).matrix
    H = random_hermitian(d, rng).matrix
    w, v = np.linalg.eigh(H)
    U = (v * np.exp(1j * w)) @ v.conj().T
    rotated = DensityMatrix(U @ rho.matrix @ U.conj().T)
    assert qfi_spectral(rotated, U @ A @ U.conj().T) == pytest.approx(qfi_spectral(rho, A), abs=1e-8)


# --------------------------------------------------------------------------
# collective maximization and resource measures


@pytest.mark.parametrize("d", range(2, 13))
def test_max_collective_reference_states(d, rng):
    for _ in range(3):
        psi = spin_coherent(d, rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        assert qfi_max_collective(psi)[0] == pytest.approx(d - 1, abs=1e-8)
    f, n = qfi_max_collective(ghz_like(d))
    assert f == pytest.approx((d - 1) ** 2, abs=1e-8)
    if d > 3:
        npt.assert_allclose(n.n, [0, 0, 1], atol=1e-10)
    if d % 2 == 1:
        mid = basis_state(d, (d - 1) // 2)
        assert qfi_max_collective(mid)[0] == pytest.approx((d * d - 1) / 2, abs=1e-8)


def test_max_collective_direction_is_the_argmax(rng):
    psi = random_pure_state(6, rng)
    f, n = qfi_max_collective(psi)
    assert qfi_pure(psi, n.operator(6)) == pytest.approx(f, abs=1e-10)
    for m in icosphere(2):
        A = GeneratorDirection.from_vector(m).operator(6)
        assert qfi_pure(psi, A) <= f + 1e-10


def test_icosphere_vertex_count():
    assert [len(icosphere(k)) for k in range(3)] == [12, 42, 162]
    npt.assert_allclose(np.linalg.norm(icosphere(2), axis=1), 1)


@pytest.mark.parametrize("d,rank", [(2, 2), (3, 2), (4, 3), (5, 5)])
def test_max_collective_matches_sphere_search(d, rank, rng):
    rho = random_density_matrix(d, rng, rank=rank)
    f, _ = qfi_max_collective(rho)
    f_search, n_search = qfi_max_collective_search(rho)
    assert f_search == pytest.approx(f, abs=1e-8)
    assert qfi_spectral(rho, n_search.operator(d)) == pytest.approx(f, abs=1e-8)


def test_max_collective_search_dephased_ghz():
    rho = ghz_dephased(3, DephasingChannel(0.01))
    assert qfi_max_collective_search(rho)[0] == pytest.approx(qfi_max_collective(rho)[0], abs=1e-8)


def test_generator_direction_validation():
    with pytest.raises(ValueError):
        GeneratorDirection((1.0, 1.0, 0.0))
    n = GeneratorDirection.from_vector([0, 0, -2])
    assert n.n == (0.0, 0.0, 1.0)


@pytest.mark.parametrize("d", range(2, 11))
def test_d_eff_and_measures(d, rng):
    coh = spin_coherent(d, 0.4, 1.1)
    assert d_eff(coh) == pytest.approx(1, abs=1e-8)
    assert nonclassicality(coh) == pytest.approx(0, abs=1e-8)
    assert metrological_power(coh) == 0 or metrological_power(coh) < 1e-8

    ghz = ghz_like(d)
    assert d_eff(ghz) == pytest.approx(d - 1, abs=1e-8)
    assert nonclassicality(ghz) == pytest.approx((d - 1) * (d - 2), abs=1e-8)
    assert metrological_power(ghz) == pytest.approx(max(d - 2, 0), abs=1e-8)

    assert nonclassicality(DensityMatrix(np.eye(d) / d)) == pytest.approx(-(d - 1), abs=1e-12)
    if d % 2 == 1:
        assert d_eff(basis_state(d, (d - 1) // 2)) == pytest.approx((d + 1) / 2, abs=1e-8)


def test_qubit_has_no_power(rng):
    for _ in range(10):
        assert metrological_power(random_pure_state(2, rng)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
def test_pure_state_measure_identity_and_range(d, seed):
    psi = random_pure_state(d, np.random.default_rng(seed))
    de = d_eff(psi)
    assert 1 - 1e-8 <= de <= d - 1 + 1e-8
    power = metrological_power(psi)
    assert power == max(de - 1, 0.0)
    if power > 0:
        assert nonclassicality(psi) == pytest.approx((d - 1) * power, abs=1e-8)


def test_metrological_power_with_fixed_generator():
    rho = ghz_dephased(4, DephasingChannel(0.01))
    P = phase_generator(4)
    assert metrological_power(rho, P) == pytest.approx(max(qfi_spectral(rho, P) / 3 - 1, 0), abs=1e-14)


def test_n_eff():
    assert n_eff(dicke_multiqubit(4, 0), 4) == pytest.approx(1, abs=1e-10)
    for n in (1, 2, 5):
        assert n_eff(ghz_multiqubit(n), n) == pytest.approx(n, abs=1e-10)
    # N = 3, one excitation <-> qudit d = 4 level 2
    f_qudit, _ = qfi_max_collective(basis_state(4, 2))
    assert n_eff(dicke_multiqubit(3, 1), 3) == pytest.approx(f_qudit / 3, abs=1e-10)
    assert n_eff(dicke_multiqubit(3, 1), 3) == pytest.approx(d_eff(basis_state(4, 1)) * 3 / 3, abs=1e-10)
    with pytest.raises(ValueError):
        n_eff(ghz_multiqubit(3), 4)


def test_n_eff_mixed_multiqubit():
    psi = ghz_multiqubit(3).amplitudes
    rho = np.outer(psi, psi.conj())
    assert n_eff(rho, 3) == pytest.approx(3, abs=1e-10)


def test_cramer_rao():
    assert cramer_rao(4, 1) == 0.25
    assert cramer_rao(9, 1) == pytest.approx(1 / 9)
    assert cramer_rao(0, 3) == math.inf
    assert cramer_rao(4, 10) == pytest.approx(0.025)
    with pytest.raises(ValueError):
        cramer_rao(1.0, 0)


def test_qfi_report():
    rep = qfi_report(ghz_like(4), m=1)
    assert rep.f_q == pytest.approx(9)
    assert rep.metrological_power == max(rep.d_eff - 1, 0)
    assert rep.crb * rep.f_q == pytest.approx(1)
    doc = rep.to_dict()
    assert set(doc) == {"f_q", "direction", "d_eff", "nonclassicality", "metrological_power", "crb"}
    assert qfi_report(DensityMatrix(np.eye(3) / 3)).to_dict()["crb"] == "inf"
