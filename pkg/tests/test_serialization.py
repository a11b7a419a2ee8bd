import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from qudit_metrology import DensityMatrix, ghz_like, random_density_matrix, random_hermitian, random_pure_state
from qudit_metrology.serialization import dumps, loads, state_from_dict, state_to_dict


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 9), seed=st.integers(0, 2**32 - 1))
def test_round_trip_is_exact(d, seed):
    rng = np.random.default_rng(seed)
    for obj in (random_pure_state(d, rng), random_density_matrix(d, rng), random_hermitian(d, rng)):
        back = loads(dumps(obj))
        assert type(back) is type(obj)
        field = "amplitudes" if hasattr(obj, "amplitudes") else "matrix"
        npt.assert_array_equal(getattr(back, field), getattr(obj, field))


def test_layout():
    doc = state_to_dict(ghz_like(2))
    assert doc["type"] == "pure_state" and doc["dim"] == 2
    assert doc["amplitudes"][0] == [pytest.approx(2 ** -0.5), 0.0]
    json.dumps(doc)


def test_rejects_bad_documents():
    with pytest.raises(ValueError):
        state_from_dict({"type": "pure_state", "dim": 3, "amplitudes": [[1, 0], [0, 0]]})
    with pytest.raises(ValueError):
        state_from_dict({"type": "tensor", "dim": 2})
    with pytest.raises(ValueError):
        state_from_dict({"type": "density_matrix", "dim": 2, "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]})
    with pytest.raises(TypeError):
        state_to_dict(np.eye(2))


def test_density_matrix_round_trip():
    rho = DensityMatrix(np.diag([0.25, 0.75]))
    npt.assert_array_equal(loads(dumps(rho)).matrix, rho.matrix)
