import json
import math

import numpy as np
import pytest

from oracles import gamma32_oracle_zeros

from ite_ball import rootfind as rf
from ite_ball import survey as sv
from ite_ball.errors import ConditionError, DomainError
from ite_ball.transmission import Medium, make_mode, medium_pair_from_values

GAMMA2 = medium_pair_from_values(1, 1, 1, 4, 3)
GAMMA32 = medium_pair_from_values(1, 1, 1, 9 / 4, 3)


def rec(lam, mult=1, l=0):
    return rf.ZeroRecord(complex(lam), mult, 0.0, make_mode(l, 3), mult, None)


# ----------------------------------------------------------------------------
# counting


def test_counting_gamma2_mode0():
    zs = [rec(k * math.pi, 3) for k in (1, 2, 3, 4)]
    rep = sv.counting_function(zs, [5.0, 10.0])
    assert rep.n_distinct == [1, 3]
    assert rep.n_weighted == [3, 9]


def test_counting_uses_harmonic_dimension():
    rep = sv.counting_function([rec(2.0, 1, l=1), rec(2.0, 1, l=0)], [3.0])
    assert rep.n_distinct == [2] and rep.n_weighted == [4]


def test_counting_empty():
    rep = sv.counting_function([], [1.0, 2.0])
    assert rep.n_distinct == [0, 0] and rep.n_weighted == [0, 0] and rep.fit is None


def test_counting_power_law_fit():
    # N(r) = r^3 exactly when the zeros sit at cube roots of integers
    zs = [rec(k ** (1 / 3) + 1e-12) for k in range(1, 20001)]
    rep = sv.counting_function(zs, np.linspace(10, 27, 8))
    a, b = rep.fit
    assert b == pytest.approx(3, abs=0.01)


# ----------------------------------------------------------------------------
# progressions


def test_progression_synthetic():
    zs = [2 * k + (1 + 1j) for k in range(8)]
    rep = sv.progression_detect(zs)
    assert rep.alpha == pytest.approx(2.0, abs=1e-12)
    assert rep.beta == pytest.approx(1 + 1j, abs=1e-12)
    assert rep.matched and rep.im_beta_nonzero


def test_progression_real_axis_flags_zero_imaginary_part():
    zs = [k * math.pi for k in range(1, 9)]
    rep = sv.progression_detect(zs, half="real")
    assert rep.alpha == pytest.approx(math.pi, abs=1e-12)
    assert not rep.im_beta_nonzero


def test_progression_gamma32_matches_polynomial_roots():
    mode = make_mode(0, 3)
    recs = rf.subdivide_localize(rf.mode_evaluator(mode, GAMMA32), rf.Rectangle((0.5, 40.0), (-3.0, 3.0)), mode=mode)
    rep = sv.progression_detect(recs)
    oracle = [z for z in gamma32_oracle_zeros((0.5, 40.0)) if z.imag > 0]
    assert rep.matched and rep.im_beta_nonzero
    assert rep.alpha == pytest.approx(oracle[1].real - oracle[0].real, abs=1e-9)
    assert abs(rep.beta - oracle[0]) < 1e-9


def test_progression_needs_four_points():
    with pytest.raises(DomainError):
        sv.progression_detect([1 + 1j, 2 + 1j])
    with pytest.raises(DomainError):
        sv.progression_detect([1 + 1j] * 5, half="left")


# ----------------------------------------------------------------------------
# strip


def test_strip_stable_rule():
    assert sv.strip_stable([(10, 1.0), (20, 1.04)])
    assert not sv.strip_stable([(10, 1.0), (20, 1.05)])
    assert sv.strip_stable([(10, 0.0), (20, 0.0)])
    assert not sv.strip_stable([(10, 0.0), (20, 1e-3)])


def test_band_edges():
    assert sv.band_edges(40.0, 2) == [0.5, 10.0, 20.0, 40.0]
    with pytest.raises(DomainError):
        sv.band_edges(1.0, 2)


def test_strip_scan_gamma32_small():
    rep = sv.strip_scan(GAMMA32, 3, 0, 30.0, 3.0)
    assert not rep.failures
    oracle = gamma32_oracle_zeros((0.5, 30.0))
    assert rep.c_emp == pytest.approx(max(abs(z.imag) for z in oracle), abs=1e-9)
    assert len([z for z in rep.zeros if abs(z.lam.imag) > 1e-6]) == len(oracle)
    doc = rep.to_json()
    assert doc["stable"] == rep.stable and doc["zero_count"] == len(rep.zeros)


def test_strip_scan_warns_on_violated_pair():
    with pytest.warns(RuntimeWarning):
        sv.strip_scan(medium_pair_from_values(1, 1, 2, 2, 3), 3, 0, 4.0, 1.0)


# ----------------------------------------------------------------------------
# sweeps


def test_eta_decay_rows_and_slope():
    rows = sv.eta_decay_sweep([5.0], [complex(200, b) for b in (5, 10, 20)], 0.5)
    assert len(rows) == 3
    assert sv.decay_slope(rows, 5.0) < -0.2
    assert math.isnan(sv.decay_slope(rows, 7.0))


def test_psi_rho_sweep_flags_poles():
    j01 = 2.404825557695773
    rows, summary = sv.psi_rho_sweep([j01], nus=[0.0, 1.0])
    assert summary[0]["poles"] == 1 and rows[0][4] == "pole"


def test_dn_error_rows():
    rows = sv.dn_error_sweep([300 + 20j], Medium(1, 1), 3)
    assert rows[0][2] == 1200 and rows[0][3] <= 0.1


def test_g_bound_exponent_default_and_violation():
    _, fits, k = sv.g_bound_sweep(medium_pair_from_values(1, 4, 4, 0.5), [100 + 10j])
    assert k == -1 and fits[0][1] > 0
    with pytest.raises(ConditionError):
        sv.g_bound_sweep(medium_pair_from_values(1, 1, 2, 2), [100 + 10j])


def test_relative_spread():
    assert sv.relative_spread([1.0, 1.1, 1.05]) == pytest.approx(0.1)


def test_writers(tmp_path):
    p = tmp_path / "r.csv"
    sv.write_rows_csv(p, ("a", "b"), [(1.0, "x")], ["hdr"])
    assert p.read_text().splitlines() == ["# hdr", "a,b", "1,x"]
    q = tmp_path / "r.json"
    sv.write_json(q, {"z": 1 + 2j, "a": np.float64(0.5)})
    assert json.loads(q.read_text())["a"] == 0.5
