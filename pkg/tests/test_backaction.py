import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twirlkit import backaction as ba
from twirlkit import channel as ch
from twirlkit import twirl as tw
from twirlkit.errors import DomainError, ValidationError

UNIFORM = np.full(4, 0.25)


def test_no_excitation_exact_examples():
    assert ba.no_excitation_exact(1, 1.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert abs(ba.no_excitation_exact(1, 1.0, 1.0) - 0.36788) < 1e-5
    assert abs(ba.no_excitation_exact(2, 1.0, 1.0) - 0.13534) < 1e-5


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t1", [0.5, 2.0])
def test_no_excitation_exact_matches_closed_form(n, t1):
    for t in np.linspace(0, 3 * t1, 7):
        expm = ba.no_excitation_exact(n, t1, t, "expm")
        assert abs(expm - np.exp(-n * t / t1)) < 1e-9
        assert abs(ba.no_excitation_exact(n, t1, t, "eigen") - expm) < 1e-9


def test_no_excitation_exact_monotone():
    ps = [ba.no_excitation_exact(2, 1.0, t) for t in np.linspace(0, 3, 31)]
    assert all(b <= a for a, b in zip(ps, ps[1:]))


def test_no_excitation_exact_errors():
    with pytest.raises(DomainError):
        ba.no_excitation_exact(1, 0.0, 1.0)
    with pytest.raises(DomainError):
        ba.no_excitation_exact(1, 1.0, -1.0)
    with pytest.raises(ValueError):
        ba.no_excitation_exact(1, 1.0, 1.0, "taylor")


def test_effective_hamiltonian_is_trace_decreasing():
    heff = ba.effective_hamiltonian(2, 0.7)
    anti = -0.5j * (heff.matrix - heff.matrix.conj().T)
    assert np.linalg.eigvalsh(anti).max() < 1e-10
    with pytest.raises(ValidationError):
        ba.EffectiveHamiltonian(1, 1.0, np.zeros((2, 2)), np.diag([0, 1j]))


def test_time_ordered_matches_constant_rate():
    p = ba.no_excitation_time_ordered(2, lambda t: 1.0, 0.8, steps=20)
    assert abs(p - np.exp(-1.6)) < 1e-12
    # a linearly growing rate integrates to exp(-n * t^2 / 2)
    p = ba.no_excitation_time_ordered(1, lambda t: t, 1.0, steps=2000)
    assert abs(p - np.exp(-0.5)) < 1e-6


def test_pta_step_probs_examples():
    assert np.abs(np.array(ba.pta_step_probs(1.0, 1e-12).probs) - [1, 0, 0, 0]).max() < 1e-11
    assert np.abs(np.array(ba.pta_step_probs(1.0, 1e3).probs) - UNIFORM).max() < 1e-12
    lam = ch.lambda_of_time(0.3, 1.0)
    p = ba.pta_step_probs(1.0, 0.3).probs
    assert abs(p[1] - lam / 4) < 1e-15 and abs(p[2] - lam / 4) < 1e-15
    with pytest.raises(DomainError):
        ba.pta_step_probs(1.0, 0.0)


def test_iterate_fixed_points():
    for p in ((1, 0, 0, 0), tuple(UNIFORM)):
        s = ba.PtaMapState(p, p)
        assert np.abs(np.array(ba.iterate_pta(s).probs) - p).max() < 1e-15


def test_state_validation():
    with pytest.raises(ValidationError):
        ba.PtaMapState((0.5, 0.5, 0.5, 0), (1, 0, 0, 0))
    with pytest.raises(ValidationError):
        ba.PtaMapState((1, 0, 0), (1, 0, 0, 0))


def pauli_channel_of(p):
    return tw.PauliChannel(1, p).to_kraus()


@pytest.mark.parametrize("lam", [0.05, 0.4, 0.9])
def test_iteration_matches_composed_twirl(lam):
    p1 = tw.ad_twirl_probs(lam)
    step = pauli_channel_of(p1)
    composed = step
    state = ba.PtaMapState(p1, p1)
    for _ in range(2, 7):
        state = ba.iterate_pta(state)
        composed = ch.compose(step, composed)
        assert np.abs(np.array(state.probs) - tw.twirl_diagonal(composed).probs).max() < 1e-10


def test_iteration_generic_probabilities():
    p1 = (0.6, 0.1, 0.2, 0.1)
    state = ba.iterate_pta(ba.PtaMapState(p1, p1))
    comp = ch.compose(pauli_channel_of(p1), pauli_channel_of(p1))
    assert np.abs(np.array(state.probs) - tw.twirl_diagonal(comp).probs).max() < 1e-12


def test_probability_sum_preserved_long_run(backend):
    orbit = backend.pta_orbit(tuple(tw.ad_twirl_probs(0.37)), (1.0, 0.0, 0.0, 0.0), 10_000)
    assert np.abs(orbit.sum(axis=1) - 1).max() < 1e-12


interior = st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4).map(lambda v: tuple(np.array(v) / sum(v)))


@settings(max_examples=40, deadline=None)
@given(interior)
def test_convergence_from_interior(p1):
    orbit = ba.iterate_to_fixed_point(p1, tol=1e-12, max_iter=100_000)
    assert np.abs(orbit[-1] - UNIFORM).max() < 1e-6


@pytest.mark.parametrize("lam", [0.01, 0.1, 0.5, 0.99, 1.0])
def test_convergence_from_amplitude_damping(lam):
    orbit = ba.iterate_to_fixed_point(tuple(tw.ad_twirl_probs(lam)), tol=1e-12)
    assert np.abs(orbit[-1] - UNIFORM).max() < 1e-6


def test_boundary_counterexamples():
    # points on the simplex boundary need not reach the uniform distribution
    orbit = ba.iterate_to_fixed_point((0.5, 0.5, 0, 0), tol=1e-12, max_iter=100)
    assert len(orbit) == 1 and np.abs(orbit[0] - [0.5, 0.5, 0, 0]).max() == 0
    orbit = ba.iterate_to_fixed_point((0, 1, 0, 0), tol=1e-12, max_iter=50)
    # X composed with X alternates between X and I forever
    assert len(orbit) == 51 and np.abs(orbit[-1] - [0, 1, 0, 0]).max() == 0
    assert np.abs(orbit[1] - [1, 0, 0, 0]).max() == 0


def test_no_excitation_pta_examples():
    assert ba.no_excitation_pta(1.0, 0.1, 0) == 1.0
    assert abs(ba.no_excitation_pta(1.0, 0.1, 2000) - 0.5) < 1e-12
    assert abs(ba.no_excitation_pta(1.0, 0.1, 2000, n_qubits=3) - 0.125) < 1e-12
    for lam in (1e-3, 1e-4):
        t_step = -np.log1p(-lam)
        assert abs(ba.no_excitation_pta(1.0, t_step, 1) - (1 - lam / 2)) < lam**2


def test_pta_no_excitation_closed_form():
    # the twirled map is unital, so p_I + p_Z after k steps is (1 + (1 - lam)^k) / 2
    t1, t_step = 0.8, 0.02
    lam = ch.lambda_of_time(t_step, t1)
    orbit = ba.pta_orbit(t1, t_step, 300)
    k = np.arange(301)
    assert np.abs(orbit[:, 0] + orbit[:, 3] - (1 + (1 - lam) ** k) / 2).max() < 1e-12


def test_small_time_gap_vanishes():
    gaps = []
    for t_step in (1e-2, 1e-3, 1e-4):
        s = ba.backaction_scan(1, 1.0, t_step, 2 * t_step)
        gaps.append(s.gap[1])
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-4
    assert ba.backaction_scan(2, 1.0, 0.01, 0.05).gap[0] == 0


def test_threshold_rules():
    lam = ch.lambda_of_time(0.01, 1.0)
    assert ba.bit_flip_threshold(1.0, 0.01) == pytest.approx(lam / 4)
    assert ba.bit_flip_threshold(1.0, 0.01, "pxy") == pytest.approx(lam / 2)
    with pytest.raises(ValueError):
        ba.bit_flip_threshold(1.0, 0.01, "union")


def test_divergence_none_before_crossing():
    s = ba.backaction_scan(1, 1.0, 0.01, 0.05)
    s.threshold = 1.0
    s.__post_init__()
    assert s.divergence_time is None


def test_divergence_ordering_in_qubits():
    times = [ba.divergence_time(n, 1.0, 0.01, 1.0) for n in (1, 2, 3, 4)]
    assert all(b <= a for a, b in zip(times, times[1:]))


def test_scan_methods_agree():
    a = ba.backaction_scan(2, 1.0, 0.05, 1.0)
    b = ba.backaction_scan(2, 1.0, 0.05, 1.0, method="eigen")
    assert np.abs(a.p_exact - b.p_exact).max() < 1e-9
    assert a.p_exact[0] == a.p_pta[0] == 1
    with pytest.raises(DomainError):
        ba.backaction_scan(1, 1.0, 0.1, 0.1)


def test_csv():
    buf = io.StringIO()
    ba.write_backaction_csv([ba.backaction_scan(n, 1.0, 0.1, 0.3) for n in (1, 2)], buf)
    main, summary = buf.getvalue().split("\n\n")
    assert main.splitlines()[0] == "n_qubits,t,p_exact,p_pta,gap,threshold,crossed"
    assert len(main.splitlines()) == 1 + 2 * 4
    assert summary.splitlines()[0] == "n_qubits,divergence_time"
