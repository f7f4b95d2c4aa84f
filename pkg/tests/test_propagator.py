import csv
import math

import pytest

from spinchain import (
    BasisState,
    ChainParams,
    SparseState,
    apply_pulse,
    cn_remote_protocol,
    cn_trajectory,
    epsilon,
    first_order_states,
    resonant_spin,
    run_protocol,
    suppression_windows,
    total_variation_distance,
    unwanted_census,
)
from spinchain.propagator import write_report_csv, write_state_csv
from spinchain.protocol import Pulse


def ground_run(L, Omega, P_drop=1e-6):
    params = ChainParams(L=L)
    seq = cn_remote_protocol(params, Omega)
    return run_protocol(SparseState.from_basis(BasisState.ground(L)), seq,
                        params, P_drop=P_drop)


def test_resonant_spin_lookup(params5):
    w3 = params5.omega0 + 3 * params5.delta_omega
    assert resonant_spin(w3, params5) == 3
    assert resonant_spin(w3 - 2 * params5.J, params5) == 3
    assert resonant_spin(params5.omega0 - 2 * params5.J, params5) == 0
    with pytest.raises(ValueError):
        resonant_spin(params5.omega0 - 3 * params5.J, params5)
    with pytest.raises(ValueError):
        resonant_spin(params5.omega0 + 4 * params5.delta_omega + 3, params5)


def test_first_pulse_moves_control_branch(params5):
    seq = cn_remote_protocol(params5, 0.0906)
    state = SparseState.from_basis(BasisState.from_string("10000"))
    out = apply_pulse(state, seq.pulses[0], params5, P_drop=0.0)
    assert out.probability(BasisState.from_string("11000")) == pytest.approx(1.0, abs=1e-12)
    assert out.t == pytest.approx(seq.pulses[0].tau)


def test_first_pulse_leak_from_ground_matches_eps(params5):
    seq = cn_remote_protocol(params5, 0.0906)
    state = SparseState.from_basis(BasisState.ground(5))
    out = apply_pulse(state, seq.pulses[0], params5, P_drop=0.0)
    leaked = out.probability(BasisState.from_string("01000"))  # qubit L-2 flipped
    assert leaked == pytest.approx(4.78e-5, rel=0.01)
    assert out.probability(BasisState.ground(5)) == pytest.approx(1 - leaked, abs=1e-10)


def test_absent_partner_enters_with_zero_amplitude(params5):
    # a lone upper state must feed its lower partner, not be rescaled
    seq = cn_remote_protocol(params5, 0.0906)
    upper = BasisState.from_string("11000")
    out = apply_pulse(SparseState.from_basis(upper), seq.pulses[0], params5, P_drop=0.0)
    assert out.probability(BasisState.from_string("10000")) == pytest.approx(1.0, abs=1e-12)


def test_phase_not_supported(params5):
    bad = Pulse(nu=params5.omega0, Omega=0.1, tau=1.0, phase=0.3)
    with pytest.raises(ValueError):
        apply_pulse(SparseState.from_basis(BasisState.ground(5)), bad, params5)


def test_p_drop_validation(params5):
    pulse = Pulse(nu=params5.omega0, Omega=0.1, tau=1.0)
    with pytest.raises(ValueError):
        apply_pulse(SparseState.from_basis(BasisState.ground(5)), pulse, params5, P_drop=1.0)


def test_no_pruning_conserves_norm(params5):
    final, _ = ground_run(5, 0.0906, P_drop=0.0)
    assert final.total_probability() == pytest.approx(1.0, abs=1e-10)
    assert final.dropped < 1e-12


def test_dropped_ledger_monotone_and_exact():
    final, report = ground_run(8, 0.0906, P_drop=1e-6)
    assert all(b >= a for a, b in zip(report.dropped_cumulative,
                                      report.dropped_cumulative[1:]))
    assert final.dropped > 0
    assert final.total_probability() + final.dropped == pytest.approx(1.0, abs=1e-12)


def test_run_protocol_resonant_branch(params5):
    params = params5
    seq = cn_remote_protocol(params, 0.0906)
    traj = cn_trajectory(params)
    final, report = run_protocol(SparseState.from_basis(traj[0]), seq, params, P_drop=0.0)
    assert final.probability(traj[-1]) >= 1 - 1e-10
    assert len(report.active_states) == len(seq)
    assert report.wall_time > 0


def test_run_protocol_splits_superposition(params5):
    alpha, beta = 0.6, 0.8
    seq = cn_remote_protocol(params5, 0.0906)
    initial = SparseState.from_superposition([
        (BasisState.ground(5), alpha),
        (BasisState.from_string("10000"), beta),
    ])
    final, _ = run_protocol(initial, seq, params5, P_drop=0.0)
    # no pulse addresses the control spin, so the two sectors never mix
    assert final.probability(BasisState.from_string("10001")) == pytest.approx(beta**2, abs=1e-8)
    control_sector = sum(p for s, p in final.probabilities().items() if s >> 4)
    assert control_sector == pytest.approx(beta**2, abs=1e-12)


def test_suppression_window_run_has_no_visible_unwanted_states():
    # pick the deepest double-suppression window near Omega=0.02 and verify
    # the whole protocol leaves nothing above P0 on the ground branch
    windows = suppression_windows(P0=1e-6, deltas=(2.0, 4.0),
                                  omega_lo=0.0199, omega_hi=0.0205, samples=20_000)
    assert windows
    lo, hi = windows[0]
    omega = 0.5 * (lo + hi)
    final, _ = ground_run(6, omega, P_drop=0.0)
    unwanted = {s: p for s, p in final.probabilities().items() if s != 0}
    assert unwanted
    assert max(unwanted.values()) < 1e-6


def test_census_counts_and_families():
    L = 8
    final, _ = ground_run(L, 0.0906)
    census = unwanted_census(final, threshold=1e-6)
    assert census.count == 2 * L - 3
    family_a, family_b = first_order_states(L)
    assert {s.bits for s, _ in census.table} == {s.bits for s in family_a + family_b}
    assert census.p1_total == pytest.approx(sum(p for _, p in census.table))
    # target-flipped subset is exactly family A
    expect_cal = sum(p for s, p in census.table if s.bit(0) == 1 and s.bit(L - 1) == 0)
    assert census.p1_target == pytest.approx(expect_cal)
    assert census.p1_target < census.p1_total
    # table sorted by descending probability
    probs = [p for _, p in census.table]
    assert probs == sorted(probs, reverse=True)


def test_census_of_resonant_branch_is_empty(params5):
    # the resonant branch parks everything on the gate target, which is a
    # wanted state
    seq = cn_remote_protocol(params5, 0.0906)
    final, _ = run_protocol(SparseState.from_basis(BasisState.from_string("10000")),
                            seq, params5, P_drop=0.0)
    census = unwanted_census(final, threshold=1e-6)
    assert census.count == 0

    ground_final, _ = ground_run(5, 0.0906, P_drop=1e-6)
    census2 = unwanted_census(ground_final, threshold=0.9)  # nothing that big
    assert census2.count == 0


def test_census_validates_length():
    final, _ = ground_run(4, 0.0906)
    with pytest.raises(ValueError):
        unwanted_census(final, L=5)


@pytest.mark.parametrize("L", [25, 50, 100])
def test_active_state_count_stays_quadratic(L):
    # eps2 < eps < eps3 regime; the paper-level bound is c*L^2
    final, report = ground_run(L, 0.20844, P_drop=1e-6)
    assert report.max_active() <= L * L


def test_pulse_splitting_composes_exactly(params5):
    # tau/2 twice == tau once for every pair the pulse touches
    seq = cn_remote_protocol(params5, 0.0906)
    pulse = seq.pulses[0]
    half = Pulse(nu=pulse.nu, Omega=pulse.Omega, tau=pulse.tau / 2)
    initial = SparseState.from_superposition([
        (BasisState.ground(5), 0.5),
        (BasisState.from_string("10000"), 0.5),
        (BasisState.from_string("01010"), 0.5),
        (BasisState.from_string("00110"), 0.5),
    ])
    once = apply_pulse(initial, pulse, params5, P_drop=0.0)
    twice = apply_pulse(apply_pulse(initial, half, params5, P_drop=0.0),
                        half, params5, P_drop=0.0)
    assert set(once.amplitudes) == set(twice.amplitudes)
    for s, c in once.amplitudes.items():
        assert twice.amplitudes[s] == pytest.approx(c, abs=1e-10)


def test_total_variation_distance():
    assert total_variation_distance({0: 1.0}, {0: 1.0}) == 0.0
    assert total_variation_distance({0: 1.0}, {1: 1.0}) == 1.0
    assert total_variation_distance({0: 0.75, 1: 0.25}, {0: 0.5, 1: 0.5}) == pytest.approx(0.25)


def test_state_and_report_csv(tmp_path):
    final, report = ground_run(4, 0.0906)
    spath = tmp_path / "state.csv"
    write_state_csv(final, spath)
    with open(spath, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["state", "probability", "amplitude_re", "amplitude_im"]
    assert rows[1][0] == "0000"  # ground dominates
    probs = [float(r[1]) for r in rows[1:]]
    assert probs == sorted(probs, reverse=True)
    for r in rows[1:]:
        assert float(r[1]) == pytest.approx(float(r[2])**2 + float(r[3])**2)

    rpath = tmp_path / "report.csv"
    write_report_csv(report, rpath)
    with open(rpath, newline="") as fh:
        rrows = list(csv.reader(fh))
    assert rrows[0] == ["pulse_index", "active_states", "dropped_cumulative"]
    assert len(rrows) - 1 == 5  # 2L-3 pulses
    assert [int(r[0]) for r in rrows[1:]] == [1, 2, 3, 4, 5]
