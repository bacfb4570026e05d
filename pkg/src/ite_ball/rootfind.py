"""Zeros of holomorphic functions in rectangles.

Winding numbers come from phase continuation along the boundary: samples
are added until consecutive phase steps are below ``max_phase_step``, and
the summed increments divided by 2 pi must be within 0.25 of an integer.
Samples are cached per boundary line, so sub-boxes created by subdivision
reuse their parent's work.

Simple zeros are polished by Newton's method.  A box that keeps a winding
number m >= 2 after it has shrunk to ``cluster_diameter`` is resolved by
the contour moments ``(1/2 pi i) int (z-c)^p f'/f dz``: if the moments show
a single point, it is reported as one zero of multiplicity m located at
the moment centroid.  Bisecting such a box further is pointless since
rounding smears an m-fold zero over a disk of radius ~ eps^{1/m}.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BoundaryZeroError,
    DepthExhaustedError,
    DomainError,
    IteError,
    NewtonEscapeError,
    PhaseStepError,
)
from .scaled import arr_normalize

JITTER = (0.0, 1.0, -1.0, 2.5, -2.5, 6.0, -6.0, 15.0)
SPLIT_FRACTIONS = (0.5137, 0.4791, 0.5419, 0.4583, 0.5731)


@dataclass(frozen=True)
class Rectangle:
    re_range: tuple
    im_range: tuple

    def __post_init__(self):
        (a, b), (c, d) = self.re_range, self.im_range
        if not (a < b and c < d):
            raise DomainError(f"empty rectangle {self.re_range} x {self.im_range}")

    @property
    def center(self) -> complex:
        return complex(0.5 * sum(self.re_range), 0.5 * sum(self.im_range))

    @property
    def width(self) -> float:
        return self.re_range[1] - self.re_range[0]

    @property
    def height(self) -> float:
        return self.im_range[1] - self.im_range[0]

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def contains(self, z: complex) -> bool:
        return self.re_range[0] <= z.real <= self.re_range[1] and self.im_range[0] <= z.imag <= self.im_range[1]

    def expanded(self, amount: float) -> "Rectangle":
        return Rectangle(
            (self.re_range[0] - amount, self.re_range[1] + amount),
            (self.im_range[0] - amount, self.im_range[1] + amount),
        )

    def as_list(self):
        return [list(self.re_range), list(self.im_range)]


@dataclass(frozen=True)
class ContourSettings:
    quad_points_per_edge: int = 16
    max_depth: int = 40
    refine_tol: float = 1e-10
    boundary_clearance: float = 1e-7
    max_phase_step: float = math.pi / 4
    max_spacing: float = 0.25
    max_samples: int = 400_000
    cluster_diameter: float = 2e-2
    newton_max_iter: int = 60

    def __post_init__(self):
        if self.max_depth > 40:
            raise DomainError("max_depth must be <= 40")
        for name in ("quad_points_per_edge", "max_depth", "refine_tol", "boundary_clearance"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if not self.max_phase_step < math.pi / 2:
            raise DomainError("max_phase_step must be below pi/2")


@dataclass
class ZeroRecord:
    lam: complex
    multiplicity: int
    residual: float
    mode: object = None
    certificate: int = 1
    box: Rectangle | None = None

    def sort_key(self):
        l = getattr(self.mode, "l", -1)
        return (l, round(self.lam.real, 9), round(self.lam.imag, 9))


# ----------------------------------------------------------------------------
# evaluators


class Evaluator:
    """Wraps ``f(lam_array) -> (mantissa, exponent)`` and an optional derivative.

    Without a derivative, f' comes from a central difference (f is assumed
    holomorphic).
    """

    def __init__(self, f: Callable, df: Callable | None = None, both: Callable | None = None):
        self.f = f
        self.df = df
        self.both = both
        self.calls = 0

    @classmethod
    def from_complex(cls, func: Callable, dfunc: Callable | None = None) -> "Evaluator":
        def f(z):
            return arr_normalize(func(z), np.zeros(np.shape(z)))

        df = None
        if dfunc is not None:

            def df(z):
                return arr_normalize(dfunc(z), np.zeros(np.shape(z)))

        return cls(f, df)

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        self.calls += z.size
        return self.f(z)

    def value_and_log_derivative(self, z):
        """(m, e, f'/f) in one batch."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        self.calls += z.size
        if self.both is not None:
            m, e, dm, de = self.both(z)
        elif self.df is not None:
            m, e = self.f(z)
            dm, de = self.df(z)
        else:
            h = 1e-6 * np.maximum(1.0, np.abs(z))
            mm, ee = self.f(np.concatenate([z, z + h, z - h]))
            n = z.size
            m, e = mm[:n], ee[:n]
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                num = mm[n : 2 * n] * np.exp(ee[n : 2 * n] - e) - mm[2 * n :] * np.exp(ee[2 * n :] - e)
                return m, e, num / (2 * h * m)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return m, e, (dm / m) * np.exp(de - e)

    def log_derivative(self, z):
        """f'/f as a plain complex array."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        self.calls += z.size
        if self.both is not None:
            m, e, dm, de = self.both(z)
        elif self.df is not None:
            m, e = self.f(z)
            dm, de = self.df(z)
        else:
            h = 1e-6 * np.maximum(1.0, np.abs(z))
            m, e = self.f(z)
            mp, ep = self.f(z + h)
            mm, em = self.f(z - h)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                num = mp * np.exp(ep - e) - mm * np.exp(em - e)
                return num / (2 * h * m)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return (dm / m) * np.exp(de - e)


# ----------------------------------------------------------------------------
# phase continuation with per-line caching


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


class _Line:
    __slots__ = ("t", "theta", "logabs", "rate")

    def __init__(self):
        self.t = np.empty(0)
        self.theta = np.empty(0)
        self.logabs = np.empty(0)
        self.rate = np.empty(0)

    def add(self, t, theta, logabs, rate):
        t_all = np.concatenate([self.t, t])
        order = np.argsort(t_all, kind="stable")
        t_all = t_all[order]
        keep = np.concatenate([[True], np.diff(t_all) > 0])
        self.t = t_all[keep]
        self.theta = np.concatenate([self.theta, theta])[order][keep]
        self.logabs = np.concatenate([self.logabs, logabs])[order][keep]
        self.rate = np.concatenate([self.rate, rate])[order][keep]


class PhaseTracker:
    """Boundary phase bookkeeping for one function; shared by all sub-boxes."""

    def __init__(self, f: Evaluator, settings: ContourSettings):
        self.f = f
        self.st = settings
        self.lines = {}
        self.samples = 0

    def _point(self, key, t):
        kind, c = key
        return (t + 1j * c) if kind == "h" else (c + 1j * t)

    def _evaluate(self, key, t):
        t = np.asarray(t, dtype=float)
        if t.size == 0:
            return
        self.samples += t.size
        if self.samples > self.st.max_samples:
            raise PhaseStepError(f"phase continuation exceeded {self.st.max_samples} samples")
        m, e, g = self.f.value_and_log_derivative(self._point(key, t))
        if np.any(m == 0) or not np.all(np.isfinite(m)):
            bad = t[(m == 0) | ~np.isfinite(m)][0]
            raise BoundaryZeroError(f"f vanishes on the contour at {self._point(key, bad)}")
        rate = np.abs(g)
        if np.any(rate * self.st.boundary_clearance > 1.0) or not np.all(np.isfinite(rate)):
            i = int(np.argmax(np.where(np.isfinite(rate), rate, np.inf)))
            raise BoundaryZeroError(f"zero within clearance of the contour near {self._point(key, t[i])}")
        la = e + np.log(np.abs(m))
        self.lines.setdefault(key, _Line()).add(t, np.angle(m), la, rate)

    def segment_change(self, key, a, b) -> float:
        """Continuous phase change of f from t=a to t=b along the line."""
        line = self.lines.get(key)
        need = []
        if line is None or not np.any(line.t == a):
            need.append(a)
        if line is None or not np.any(line.t == b):
            need.append(b)
        n0 = max(self.st.quad_points_per_edge, int(math.ceil((b - a) / self.st.max_spacing)))
        tt = np.linspace(a, b, n0 + 1)[1:-1]
        line = self.lines.get(key)
        if line is not None and line.t.size:
            inside = line.t[(line.t > a) & (line.t < b)]
            if inside.size:
                # keep only seeds not already covered at the base spacing
                idx = np.searchsorted(inside, tt)
                lo = inside[np.clip(idx - 1, 0, inside.size - 1)]
                hi = inside[np.clip(idx, 0, inside.size - 1)]
                gap = np.minimum(np.abs(tt - lo), np.abs(hi - tt))
                tt = tt[gap > 0.5 * (b - a) / n0]
        self._evaluate(key, np.concatenate([need, tt]))
        scale = max(abs(a), abs(b), 1.0)
        while True:
            line = self.lines[key]
            sel = (line.t >= a) & (line.t <= b)
            t = line.t[sel]
            th = line.theta[sel]
            la = line.logabs[sel]
            dt = np.diff(t)
            dth = _wrap(np.diff(th))
            dla = np.abs(np.diff(la))
            g = line.rate[sel]
            # |f'/f| h bounds the change of log f across the interval to first order
            lip = dt * np.maximum(g[:-1], g[1:])
            bad = (np.abs(dth) > self.st.max_phase_step) | (dla > 1.0) | (lip > 1.0)
            if not bad.any():
                return float(np.sum(dth))
            if np.min(dt[bad]) < 1e-15 * scale:
                i = int(np.flatnonzero(bad)[np.argmin(dt[bad])])
                raise BoundaryZeroError(f"phase jump not resolvable near {self._point(key, t[i])}")
            self._evaluate(key, 0.5 * (t[:-1][bad] + t[1:][bad]))

    def winding(self, rect: Rectangle) -> int:
        (x0, x1), (y0, y1) = rect.re_range, rect.im_range
        total = (
            self.segment_change(("h", y0), x0, x1)
            + self.segment_change(("v", x1), y0, y1)
            - self.segment_change(("h", y1), x0, x1)
            - self.segment_change(("v", x0), y0, y1)
        )
        w = total / (2 * math.pi)
        k = round(w)
        if abs(w - k) > 0.25:
            raise PhaseStepError(f"winding {w:.3f} is not close to an integer")
        return int(k)


def winding_count(f, rect: Rectangle, settings: ContourSettings = ContourSettings()) -> int:
    """Winding number of f around the rectangle (zeros of f inside)."""
    ev = f if isinstance(f, Evaluator) else Evaluator.from_complex(f)
    return PhaseTracker(ev, settings).winding(rect)


# ----------------------------------------------------------------------------
# refinement


def newton_refine(f, df, lam0: complex, tol: float = 1e-12, box: Rectangle | None = None, max_iter: int = 60):
    """Newton iteration; returns (root, last_step).

    ``f`` may be an Evaluator (then ``df`` is ignored) or a plain complex
    function with derivative ``df``.  Raises NewtonEscapeError if the
    iterate leaves ``box`` or does not converge.
    """
    if isinstance(f, Evaluator):

        def step(x):
            return 1.0 / complex(f.log_derivative([x])[0])

    else:

        def step(x):
            return complex(f(x)) / complex(df(x))

    x = complex(lam0)
    prev = math.inf
    slow = 0
    for _ in range(max_iter):
        try:
            s = step(x)
        except ZeroDivisionError:
            return x, 0.0
        if not np.isfinite(s):
            if s != s:  # f(x) == 0 and f'(x) == 0 gives nan
                return x, 0.0
            raise NewtonEscapeError(f"Newton step undefined at {x}")
        x = x - s
        a = abs(s)
        if box is not None and not box.contains(x):
            raise NewtonEscapeError(f"Newton iterate {x} left {box}")
        if a <= tol:
            return x, a
        # linear convergence (multiple zero) or stagnation at rounding level
        slow = slow + 1 if a > 0.5 * prev else 0
        if slow >= 8 and a <= 1e3 * tol:
            return x, a
        prev = a
    raise NewtonEscapeError(f"Newton did not converge from {lam0}")


def newton_many(f: Evaluator, lam0, tol: float = 1e-12, max_iter: int = 60, max_step: float | None = None):
    """Newton from every start in ``lam0`` at once (one batched call per sweep).

    Returns (roots, last_steps); entries that fail to converge keep their
    last iterate and a step above ``tol``.
    """
    z = np.atleast_1d(np.asarray(lam0, dtype=complex)).copy()
    step = np.full(z.shape, np.inf)
    active = np.ones(z.shape, bool)
    for _ in range(max_iter):
        if not active.any():
            break
        g = f.log_derivative(z[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            s = 1.0 / g
        s = np.where(np.isfinite(s), s, 0.0)
        if max_step is not None:
            big = np.abs(s) > max_step
            s = np.where(big, s * (max_step / np.abs(np.where(big, s, 1.0))), s)
        idx = np.flatnonzero(active)
        z[idx] -= s
        step[idx] = np.abs(s)
        active[idx[np.abs(s) <= tol]] = False
    return z, step


def contour_moments(f: Evaluator, center: complex, radius: float, npts: int = 128, order: int = 2):
    """Moments (1/2 pi i) int (z-c)^p f'/f dz, p = 0..order, on a circle."""
    th = 2 * math.pi * (np.arange(npts) + 0.5) / npts
    u = radius * np.exp(1j * th)
    g = f.log_derivative(center + u)
    if not np.all(np.isfinite(g)):
        raise BoundaryZeroError("zero on the moment circle")
    return [complex(np.mean(u ** (p + 1) * g)) for p in range(order + 1)]


def _cluster_point(f: Evaluator, center: complex, radius: float, m: int):
    """Centroid of an m-point cluster if the moments say it is a single point.

    Larger circles see a larger |f| and so less rounding noise; the largest
    radius whose zeroth moment still equals m is used, and the centroid from
    half that radius gives the residual.
    """
    for scale in (8.0, 4.0, 2.0, 1.0):
        out = []
        for r in (scale * radius, 0.5 * scale * radius):
            s0, s1, s2 = contour_moments(f, center, r)
            if abs(s0 - m) > 0.05:
                break
            c = s1 / m
            out.append((center + c, abs(s2 / m - c * c)))
        if len(out) == 2:
            (z1, sp1), (z2, sp2) = out
            return z1, abs(z1 - z2), max(sp1, sp2)
    return None


# ----------------------------------------------------------------------------
# subdivision


def _split(rect: Rectangle, depth: int, attempt: int):
    frac = SPLIT_FRACTIONS[attempt % len(SPLIT_FRACTIONS)]
    (x0, x1), (y0, y1) = rect.re_range, rect.im_range
    horizontal_cut = rect.height > rect.width or (rect.height == rect.width and depth % 2 == 1)
    if horizontal_cut:
        ym = y0 + frac * (y1 - y0)
        return [Rectangle((x0, x1), (y0, ym)), Rectangle((x0, x1), (ym, y1))]
    xm = x0 + frac * (x1 - x0)
    return [Rectangle((x0, xm), (y0, y1)), Rectangle((xm, x1), (y0, y1))]


def subdivide_localize(f, rect: Rectangle, settings: ContourSettings = ContourSettings(), mode=None, tracker=None, outer_winding=None):
    """All zeros of f inside rect as ZeroRecords (sum of multiplicities = winding)."""
    ev = f if isinstance(f, Evaluator) else Evaluator.from_complex(f)
    tr = tracker or PhaseTracker(ev, settings)
    w_outer = tr.winding(rect) if outer_winding is None else outer_winding
    found = []
    stack = [(rect, w_outer, 0)]
    while stack:
        box, w, depth = stack.pop()
        if w == 0:
            continue
        if w < 0:
            raise PhaseStepError(f"negative winding {w} in {box}: f is not holomorphic there")
        if w == 1:
            try:
                z, res = newton_refine(ev, None, box.center, tol=0.01 * settings.refine_tol, box=box, max_iter=settings.newton_max_iter)
                found.append(ZeroRecord(z, 1, res, mode, 1, box))
                continue
            except NewtonEscapeError:
                pass
        if box.diameter <= settings.cluster_diameter or depth >= settings.max_depth:
            res = _cluster_point(ev, box.center, 0.5 * box.diameter * 1.0001, w)
            if res is not None:
                z, resid, spread = res
                if spread <= max(1e-6 * box.diameter**2, settings.refine_tol**2) and box.contains(z):
                    found.append(ZeroRecord(z, w, resid, mode, w, box))
                    continue
            if depth >= settings.max_depth:
                raise DepthExhaustedError(f"could not isolate {w} zeros in {box}")
        children = None
        for attempt in range(len(SPLIT_FRACTIONS)):
            try:
                kids = _split(box, depth, attempt)
                ws = [tr.winding(k) for k in kids]
                children = list(zip(kids, ws))
                break
            except BoundaryZeroError:
                continue
        if children is None:
            raise BoundaryZeroError(f"every split of {box} hits a zero")
        if sum(ws) != w:
            raise PhaseStepError(f"winding not conserved in {box}: {w} -> {ws}")
        for k, wk in reversed(children):
            stack.append((k, wk, depth + 1))
    total = sum(z.multiplicity for z in found)
    if total != w_outer:
        raise PhaseStepError(f"multiplicity sum {total} differs from winding {w_outer}")
    found.sort(key=lambda r: (r.lam.real, r.lam.imag))
    return found


def localize_with_jitter(f, rect: Rectangle, settings: ContourSettings = ContourSettings(), mode=None):
    """subdivide_localize, expanding rect by a deterministic jitter sequence on wall zeros.

    Returns (records, rect_used, winding, jitter_index).
    """
    ev = f if isinstance(f, Evaluator) else Evaluator.from_complex(f)
    last = None
    for i, j in enumerate(JITTER):
        r = rect.expanded(j * 10 * settings.boundary_clearance) if j else rect
        tr = PhaseTracker(ev, settings)
        try:
            w = tr.winding(r)
        except BoundaryZeroError as exc:
            last = exc
            continue
        return subdivide_localize(ev, r, settings, mode, tr, w), r, w, i
    raise last


# ----------------------------------------------------------------------------
# ITE driver


def mode_evaluator(mode, pair, radial_settings=None) -> Evaluator:
    from . import transmission as tm

    if pair.is_constant:

        def f(z):
            return tm.char_det_arrays(mode, z, pair)

        def both(z):
            return tm.char_det_arrays(mode, z, pair, derivative=True)

        return Evaluator(f, both=both)

    st = radial_settings or tm.IntegratorSettings()

    def fr(z):
        return arr_normalize(tm.char_det_radial_raw(mode, z, pair, st), np.zeros(np.shape(z)))

    return Evaluator(fr)


def tail_report(pair, d: int, rect: Rectangle, l_max: int, samples: int = 24) -> dict:
    """Sampled elliptic-regime check that modes above the cutoff have no zeros in rect.

    For nu beyond 2 s_max max|lam| the mode function D/(lam J1 J2) is
    dominated by its leading symbol; the report records the smallest
    relative margin |sum| / sum|terms| over a grid of rect for several
    orders at and above the cutoff.
    """
    from . import transmission as tm
    from .specfun import psi_arrays

    (c1, n1), (c2, n2) = (m.boundary_constants for m in pair.media)
    s1, s2 = math.sqrt(n1 / c1), math.sqrt(n2 / c2)
    corners = [complex(x, y) for x in rect.re_range for y in rect.im_range]
    lam_max = max(abs(z) for z in corners)
    nu_cut = 2 * max(s1, s2) * lam_max
    l_cut = int(math.ceil(nu_cut - d / 2.0 + 1.0))
    xs = np.linspace(*rect.re_range, samples)
    ys = np.linspace(*rect.im_range, samples)
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    grid = grid[grid != 0]
    k = (c2 - c1) * (d - 2) / 2.0
    margin = math.inf
    for nu in (nu_cut, 1.5 * nu_cut, 2 * nu_cut, 4 * nu_cut):
        for lam in grid:
            p1 = psi_arrays([nu], s1 * lam)[0]
            p2 = psi_arrays([nu], s2 * lam)[0]
            t1, t2 = c1 * s1 * lam * p1, c2 * s2 * lam * p2
            tot = abs(t1 - t2 + k) / (abs(t1) + abs(t2) + abs(k))
            margin = min(margin, tot)
    return {
        "nu_cutoff": nu_cut,
        "l_cutoff": l_cut,
        "l_max": l_max,
        "modes_complete": l_max >= l_cut,
        "min_relative_margin": margin,
        "certified": bool(margin > 1e-6),
    }


def _mode_job(args):
    mode, pair, rect, settings = args
    ev = mode_evaluator(mode, pair)
    try:
        recs, used, w, jit = localize_with_jitter(ev, rect, settings, mode)
        return {"l": mode.l, "records": recs, "winding": w, "jitter": jit, "rect": used, "error": None}
    except IteError as exc:
        return {"l": mode.l, "records": [], "winding": None, "jitter": None, "rect": rect, "error": f"{type(exc).__name__}: {exc}"}


def all_zeros(pair, d: int, l_max: int, rect: Rectangle, settings: ContourSettings = ContourSettings(), jobs: int = 1, with_report: bool = False):
    """Zeros of every mode l <= l_max in rect, sorted by (l, Re, Im)."""
    from .transmission import make_mode

    if rect.re_range[0] < 1e-2:
        raise DomainError("search rectangles must satisfy Re(lambda) >= 1e-2")
    modes = [make_mode(l, d) for l in range(l_max + 1)]
    tasks = [(m, pair, rect, settings) for m in modes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_mode_job, tasks))
    else:
        results = [_mode_job(t) for t in tasks]
    records = [r for res in results for r in res["records"]]
    records.sort(key=ZeroRecord.sort_key)
    if not with_report:
        errors = [f"l={res['l']}: {res['error']}" for res in results if res["error"]]
        if errors:
            raise IteError("; ".join(errors))
        return records
    report = {
        "per_mode": [
            {"l": res["l"], "winding": res["winding"], "jitter": res["jitter"], "rect": res["rect"].as_list(), "error": res["error"]}
            for res in results
        ],
        "tail": tail_report(pair, d, rect, l_max),
    }
    return records, report


# ----------------------------------------------------------------------------
# serialization

CSV_COLUMNS = ("mode_l", "nu", "re_lambda", "im_lambda", "multiplicity", "residual")


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def record_row(r: ZeroRecord):
    l = getattr(r.mode, "l", "")
    nu = getattr(r.mode, "nu", float("nan"))
    return [l, _fmt(nu), _fmt(r.lam.real), _fmt(r.lam.imag), r.multiplicity, f"{r.residual:.3e}"]


def write_zeros_csv(records, path, header_lines=()):
    with open(path, "w", newline="") as fh:
        for h in header_lines:
            fh.write(f"# {h}\n")
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(record_row(r))


def record_to_json(r: ZeroRecord) -> dict:
    return {
        "mode_l": getattr(r.mode, "l", None),
        "nu": getattr(r.mode, "nu", None),
        "re_lambda": r.lam.real,
        "im_lambda": r.lam.imag,
        "multiplicity": r.multiplicity,
        "residual": r.residual,
        "certificate": r.certificate,
        "box": r.box.as_list() if r.box else None,
    }


def write_zeros_json(records, path, settings: ContourSettings, extra=None):
    doc = {"settings": asdict(settings), "zeros": [record_to_json(r) for r in records]}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
