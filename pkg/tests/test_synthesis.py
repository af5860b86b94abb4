import numpy as np
import pytest

from meshc.circuit import MZI, PhaseShifter, active_mzi_count, evaluate, mzi_count, mzi_depth
from meshc.core import haar_random_unitary, random_isometry
from meshc.synthesis import column_error, parameter_count, synth_boson_sampling, synth_clements, synth_reck


@pytest.mark.parametrize("m", range(2, 13))
def test_clements_counts(m):
    u = haar_random_unitary(m, seed=m)
    c = synth_clements(u)
    assert mzi_count(c) == m * (m - 1) // 2
    assert mzi_depth(c) <= m
    assert np.linalg.norm(evaluate(c) - u) < 1e-8


@pytest.mark.parametrize("m", range(2, 13))
def test_reck_counts(m):
    u = haar_random_unitary(m, seed=100 + m)
    c = synth_reck(u)
    assert mzi_count(c) == m * (m - 1) // 2
    assert mzi_depth(c) <= max(1, 2 * m - 3)
    assert np.linalg.norm(evaluate(c) - u) < 1e-8


def test_reck_m4_depth_five():
    c = synth_reck(haar_random_unitary(4, seed=0))
    assert mzi_count(c) == 6 and mzi_depth(c) == 5


@pytest.mark.parametrize("synth", [synth_clements, synth_reck])
def test_identity_inactive(synth):
    assert active_mzi_count(synth(np.eye(5))) == 0


def test_diagonal_only_terminal_phases():
    phases = np.array([0.3, -1.2, 2.0, 0.0])
    c = synth_clements(np.diag(np.exp(1j * phases)))
    assert active_mzi_count(c) == 0
    tail = [el.phi for el in c if isinstance(el, PhaseShifter)]
    assert np.allclose(np.exp(1j * np.array(tail)), np.exp(1j * phases))


@pytest.mark.parametrize("m, n", [(10, 4), (6, 1), (7, 7), (12, 5), (3, 2)])
def test_boson_sampling(m, n):
    v = random_isometry(m, n, seed=m * n)
    c = synth_boson_sampling(v)
    assert mzi_count(c) == m * n - n * (n + 1) // 2
    assert mzi_depth(c) <= m
    assert column_error(c, v) < 1e-8
    assert all(isinstance(el, (MZI, PhaseShifter)) for el in c)


def test_boson_sampling_full_width_matches_clements_count():
    v = haar_random_unitary(6, seed=1)
    assert mzi_count(synth_boson_sampling(v)) == mzi_count(synth_clements(v)) == 15


def test_boson_sampling_trivial_isometry_inactive():
    assert active_mzi_count(synth_boson_sampling(np.eye(8, 3))) == 0


def test_boson_sampling_rejects_non_isometry():
    with pytest.raises(ValueError, match="orthonormal"):
        synth_boson_sampling(np.ones((4, 2)))


@pytest.mark.parametrize("m, n, expected", [(10, 4, 60), (2, 1, 2), (5, 5, 20), (7, 7, 42)])
def test_parameter_count(m, n, expected):
    assert parameter_count(m, n) == expected
    if m == n:
        assert parameter_count(m, n) == m * (m - 1)


def test_parameter_count_rejects():
    with pytest.raises(ValueError):
        parameter_count(2, 3)


def test_partial_scheme_beats_cut_rectangle():
    # m = 10, n = 2: the cut rectangular mesh needs about (m^2 - n^2 + 2mn)/4
    m, n = 10, 2
    cut = (m * m - n * n + 2 * m * n) / 4
    ours = mzi_count(synth_boson_sampling(random_isometry(m, n, seed=0)))
    assert cut == 34 and ours == 17 == parameter_count(m, n) // 2
