import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ite_ball import rootfind as rf
from ite_ball.errors import BoundaryZeroError, DomainError, NewtonEscapeError
from ite_ball.transmission import make_mode, medium_pair_from_values

GAMMA2 = medium_pair_from_values(1, 1, 1, 4, 3)


def found(func, rect, dfunc=None, **kw):
    return rf.subdivide_localize(rf.Evaluator.from_complex(func, dfunc), rf.Rectangle(*rect), **kw)


# ----------------------------------------------------------------------------
# winding and simple functions


def test_winding_simple_zero():
    assert rf.winding_count(lambda z: z - (2 + 1j), rf.Rectangle((0, 4), (0, 2))) == 1


def test_winding_triple_zero():
    assert rf.winding_count(np.sin, rf.Rectangle((2, 4), (-1, 1))) == 1
    assert rf.winding_count(lambda z: np.sin(z) ** 3, rf.Rectangle((2, 4), (-1, 1))) == 3


def test_winding_excludes_outside_zero():
    assert rf.winding_count(lambda z: z * z + 1, rf.Rectangle((-0.5, 0.5), (0.5, 2))) == 1
    assert rf.winding_count(lambda z: z * z + 1, rf.Rectangle((0.5, 2), (0.5, 2))) == 0


def test_no_zeros_of_exp():
    assert found(np.exp, ((-3, 3), (-3, 3))) == []


def test_newton_sin_to_pi():
    z, step = rf.newton_refine(np.sin, np.cos, 3.0)
    assert z == pytest.approx(math.pi, abs=1e-15)


def test_newton_escape():
    with pytest.raises(NewtonEscapeError):
        rf.newton_refine(np.sin, np.cos, 1.55, box=rf.Rectangle((1.0, 2.0), (-0.5, 0.5)))


def test_quadratic_zero_in_first_quadrant():
    recs = found(lambda z: z * z - 2j, ((0, 2), (0, 2)))
    assert len(recs) == 1 and recs[0].multiplicity == 1
    assert recs[0].lam == pytest.approx(1 + 1j, abs=1e-13)


def test_triple_zero_cluster():
    recs = found(lambda z: np.sin(z) ** 3, ((2, 4.1), (-1, 1)))
    assert len(recs) == 1 and recs[0].multiplicity == 3
    assert abs(recs[0].lam - math.pi) < 1e-10


def test_close_pair_resolved_or_clustered():
    a, b = 1 + 1j, 1 + 1j + 1e-4
    recs = found(lambda z: (z - a) * (z - b), ((0, 2.03), (0.01, 2)))
    assert sum(r.multiplicity for r in recs) == 2
    for r in recs:
        assert min(abs(r.lam - a), abs(r.lam - b)) < 1e-4


@settings(max_examples=25, deadline=None)
@given(
    roots=st.lists(
        st.tuples(st.floats(-3.7, 3.7), st.floats(-3.7, 3.7)),
        min_size=1,
        max_size=6,
    )
)
def test_random_polynomial_against_companion_matrix(roots):
    rts = [complex(x, y) for x, y in roots]
    # keep roots well separated from one another and from the contour
    for i, a in enumerate(rts):
        if any(abs(a - b) < 0.05 for b in rts[:i]):
            return
    coeffs = np.poly(rts)
    oracle = np.roots(coeffs)
    recs = found(lambda z: np.polyval(coeffs, z), ((-4.013, 3.987), (-4.021, 4.009)))
    assert sum(r.multiplicity for r in recs) == len(rts)
    for r in recs:
        assert np.min(np.abs(oracle - r.lam)) < 1e-9


def test_contour_moments_count_and_centroid():
    ev = rf.Evaluator.from_complex(lambda z: (z - 0.1) * (z + 0.2j))
    m = rf.contour_moments(ev, 0j, 1.0)
    assert m[0] == pytest.approx(2, abs=1e-10)
    assert m[1] == pytest.approx(0.1 - 0.2j, abs=1e-10)


def test_finite_difference_log_derivative():
    ev = rf.Evaluator.from_complex(lambda z: z**3)
    assert ev.log_derivative([2.0 + 1j])[0] == pytest.approx(3 / (2 + 1j), rel=1e-8)


# ----------------------------------------------------------------------------
# boundary zeros


def test_zero_on_wall_raises_without_jitter():
    with pytest.raises(BoundaryZeroError):
        rf.winding_count(lambda z: z - 1.0, rf.Rectangle((1.0, 2.0), (-1.0, 1.0)))


def test_zero_at_corner_handled_by_jitter():
    recs, used, w, j = rf.localize_with_jitter(lambda z: z - (1 + 1j), rf.Rectangle((1.0, 2.0), (1.0, 2.0)))
    assert j > 0 and used != rf.Rectangle((1.0, 2.0), (1.0, 2.0))
    assert w == len(recs) == 1 and recs[0].lam == pytest.approx(1 + 1j)


def test_rectangle_validation():
    with pytest.raises(DomainError):
        rf.Rectangle((2.0, 1.0), (0.0, 1.0))


# ----------------------------------------------------------------------------
# transmission determinants


def test_gamma2_mode0_triple_zeros():
    mode = make_mode(0, 3)
    recs = rf.subdivide_localize(rf.mode_evaluator(mode, GAMMA2), rf.Rectangle((0.5, 10.0), (-1.0, 1.0)), mode=mode)
    assert [r.multiplicity for r in recs] == [3, 3, 3]
    assert np.allclose([r.lam for r in recs], [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-10)


def test_gamma2_empty_box():
    mode = make_mode(0, 3)
    assert rf.winding_count(rf.mode_evaluator(mode, GAMMA2), rf.Rectangle((1.0, 20.0), (5.0, 10.0))) == 0


def test_gamma2_first_mode_has_complex_pair():
    # the l = 1 determinant of the (1, 4) pair is not real-rooted
    mode = make_mode(1, 3)
    recs = rf.subdivide_localize(rf.mode_evaluator(mode, GAMMA2), rf.Rectangle((4.0, 5.0), (-1.0, 1.0)), mode=mode)
    cx = sorted((r.lam for r in recs if abs(r.lam.imag) > 1e-6), key=lambda z: z.imag)
    assert len(cx) == 2
    assert cx[0] == pytest.approx(cx[1].conjugate(), abs=1e-10)
    assert cx[1] == pytest.approx(4.5478 + 0.6510j, abs=1e-4)


def test_all_zeros_rejects_left_edge():
    with pytest.raises(DomainError):
        rf.all_zeros(GAMMA2, 3, 1, rf.Rectangle((0.0, 5.0), (-1.0, 1.0)))


def test_all_zeros_report_and_sort():
    recs, rep = rf.all_zeros(GAMMA2, 3, 2, rf.Rectangle((0.5, 7.0), (-1.0, 1.0)), with_report=True)
    assert [r.sort_key() for r in recs] == sorted(r.sort_key() for r in recs)
    assert all(p["error"] is None for p in rep["per_mode"])
    assert {"nu_cutoff", "modes_complete", "certified"} <= set(rep["tail"])
    for p in rep["per_mode"]:
        assert p["winding"] == sum(r.multiplicity for r in recs if r.mode.l == p["l"])


# ----------------------------------------------------------------------------
# output


def test_csv_and_json(tmp_path):
    mode = make_mode(0, 3)
    recs = rf.subdivide_localize(rf.mode_evaluator(mode, GAMMA2), rf.Rectangle((0.5, 4.0), (-1.0, 1.0)), mode=mode)
    p = tmp_path / "z.csv"
    rf.write_zeros_csv(recs, p, ["run one"])
    lines = p.read_text().splitlines()
    assert lines[0] == "# run one"
    assert lines[1] == ",".join(rf.CSV_COLUMNS)
    assert lines[2].startswith("0,0.5,3.14159265358")
    q = tmp_path / "z.json"
    rf.write_zeros_json(recs, q, rf.ContourSettings())
    doc = json.loads(q.read_text())
    assert doc["zeros"][0]["multiplicity"] == 3
    assert doc["settings"]["quad_points_per_edge"] == 16
