"""Empirical spectral surveys built on the zero finder and the symbol layer.

Reports here are findings, not proofs: the strip report says whether the
largest |Im lambda| found is stable as the scanned real range doubles, the
count report fits a power law, and the progression report says whether
the zeros of one mode lie on an arithmetic progression.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import rootfind as rf
from .errors import ConditionError, DomainError, IteError, PoleError
from .transmission import (
    VIOLATED,
    Medium,
    MediumPair,
    dn_approx_error,
    g_symbol,
    make_mode,
)
from .uniform import psi_rho_check, eta_ratio_check, region_of_lambda

STRIP_GROWTH_LIMIT = 0.05
STRIP_FLOOR = 1e-8
DEDUP_TOL = 1e-7


# ----------------------------------------------------------------------------
# strip


@dataclass
class StripReport:
    pair: str
    boxes: list
    c_emp: float
    growth: list  # (re_upper, C_emp over Re <= re_upper)
    zeros: list = field(default_factory=list, repr=False)
    failures: list = field(default_factory=list)
    envelope_fit: tuple | None = None

    @property
    def stable(self) -> bool:
        return strip_stable(self.growth)

    def to_json(self) -> dict:
        return {
            "pair": self.pair,
            "boxes": self.boxes,
            "c_emp": self.c_emp,
            "growth": self.growth,
            "stable": self.stable,
            "failures": self.failures,
            "envelope_fit": self.envelope_fit,
            "zero_count": len(self.zeros),
        }


def strip_stable(growth, limit: float = STRIP_GROWTH_LIMIT) -> bool:
    """True iff C_emp grows by less than ``limit`` (relative) at every doubling."""
    for (_, a), (_, b) in zip(growth, growth[1:]):
        if (b - a) / max(a, STRIP_FLOOR) >= limit:
            return False
    return True


def band_edges(re_max: float, doublings: int = 1, re_min: float = 0.5):
    edges = [re_max / 2**k for k in range(doublings, -1, -1)]
    if edges[0] <= re_min:
        raise DomainError("re_max too small for the requested number of doublings")
    return [re_min] + edges


def _dedup(records):
    out = []
    for r in sorted(records, key=rf.ZeroRecord.sort_key):
        if out and out[-1].mode.l == r.mode.l and abs(out[-1].lam - r.lam) < DEDUP_TOL * max(1.0, abs(r.lam)):
            continue
        out.append(r)
    return out


def _band_job(args):
    mode, pair, rect, settings = args
    res = rf._mode_job((mode, pair, rect, settings))
    res["rect"] = res["rect"].as_list()
    return res


def strip_scan(
    pair: MediumPair,
    d: int,
    l_max: int,
    re_max: float,
    im_max: float,
    settings: rf.ContourSettings = rf.ContourSettings(),
    doublings: int = 1,
    jobs: int = 1,
) -> StripReport:
    """Zeros of modes 0..l_max in [0.5, re_max] x [-im_max, im_max], by real-axis bands.

    Band edges sit at re_max / 2^k, so the growth table lists C_emp for
    each halving of the range.
    """
    if pair.condition == VIOLATED:
        warnings.warn("medium pair violates both strip conditions; scanning anyway", RuntimeWarning, stacklevel=2)
    edges = band_edges(re_max, doublings)
    rects = [rf.Rectangle((a, b), (-im_max, im_max)) for a, b in zip(edges, edges[1:])]
    tasks = [(make_mode(l, d), pair, r, settings) for l in range(l_max + 1) for r in rects]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_band_job, tasks))
    else:
        results = [_band_job(t) for t in tasks]
    zeros = _dedup([z for res in results for z in res["records"]])
    failures = [{"l": res["l"], "rect": res["rect"], "error": res["error"]} for res in results if res["error"]]
    growth = []
    for b in edges[1:]:
        ims = [abs(z.lam.imag) for z in zeros if z.lam.real <= b]
        growth.append((b, max(ims, default=0.0)))
    envelope = None
    if not pair.is_constant:
        envelope = log_envelope_fit(zeros)
    return StripReport(
        pair=describe_pair(pair),
        boxes=[r.as_list() for r in rects],
        c_emp=growth[-1][1] if growth else 0.0,
        growth=growth,
        zeros=zeros,
        failures=failures,
        envelope_fit=envelope,
    )


def log_envelope_fit(zeros, decades_per_band: int = 4):
    """Least squares of max |Im| per log-spaced Re band against log(Re + 1).

    Returns (slope, intercept) or None with fewer than two populated bands.
    """
    if not zeros:
        return None
    re = np.array([z.lam.real for z in zeros])
    im = np.abs([z.lam.imag for z in zeros])
    lo, hi = math.log10(max(re.min(), 0.5)), math.log10(re.max())
    if hi - lo < 1e-9:
        return None
    nb = max(2, int(math.ceil((hi - lo) * decades_per_band)))
    cuts = np.logspace(lo, hi, nb + 1)
    xs, ys = [], []
    for a, b in zip(cuts, cuts[1:]):
        sel = (re >= a) & (re <= b)
        if sel.any():
            xs.append(math.log(0.5 * (a + b) + 1))
            ys.append(im[sel].max())
    if len(xs) < 2:
        return None
    slope, icpt = np.polyfit(xs, ys, 1)
    return float(slope), float(icpt)


def describe_pair(pair: MediumPair) -> str:
    parts = []
    for i, m in enumerate(pair.media, 1):
        c, n = m.boundary_constants
        tag = "const" if isinstance(m, Medium) else "profile"
        parts.append(f"medium{i}(c={c:g}, n={n:g}, {tag})")
    return f"d={pair.d} " + " ".join(parts) + f" condition={pair.condition}"


# ----------------------------------------------------------------------------
# counting


@dataclass
class CountReport:
    r_grid: list
    n_distinct: list
    n_weighted: list
    fit: tuple | None

    def to_json(self) -> dict:
        return asdict(self)


def counting_function(zeros, r_grid) -> CountReport:
    """N(r) in both conventions; zeros are counted per (mode, lambda).

    n_distinct counts each (mode, lambda) once; n_weighted multiplies by the
    spherical-harmonic dimension of the mode and the analytic multiplicity.
    """
    r_grid = [float(r) for r in r_grid]
    absl = np.array([abs(z.lam) for z in zeros])
    w = np.array([z.multiplicity * getattr(z.mode, "multiplicity", 1) for z in zeros], dtype=float)
    nd, nw = [], []
    for r in r_grid:
        sel = absl <= r if absl.size else np.zeros(0, bool)
        nd.append(int(sel.sum()))
        nw.append(int(w[sel].sum()) if absl.size else 0)
    fit = None
    half = [(r, n) for r, n in zip(r_grid[len(r_grid) // 2 :], nw[len(r_grid) // 2 :]) if n > 0 and r > 0]
    if len(half) >= 2:
        b, loga = np.polyfit(np.log([h[0] for h in half]), np.log([h[1] for h in half]), 1)
        fit = (float(math.exp(loga)), float(b))
    return CountReport(r_grid, nd, nw, fit)


# ----------------------------------------------------------------------------
# arithmetic progressions


@dataclass
class ProgressionReport:
    alpha: float
    beta: complex
    residuals: list
    matched_count: int
    matched: bool
    im_beta_nonzero: bool
    levels: int = 1

    def to_json(self) -> dict:
        d = asdict(self)
        d["beta"] = [self.beta.real, self.beta.imag]
        return d


def progression_detect(zeros, tol: float = 1e-6, half: str = "upper", level_tol: float = 1e-3) -> ProgressionReport:
    """Fit lambda_k = alpha k + beta to the zeros of one mode.

    Zeros are restricted to one half plane (``half`` is "upper", "lower" or
    "real" for |Im| <= level_tol), grouped into levels of equal Im, and the
    most populated level is fitted: alpha is the median gap, k comes from
    rounding, beta is the mean intercept.
    """
    lams = np.array([complex(getattr(z, "lam", z)) for z in zeros])
    if half == "upper":
        lams = lams[lams.imag > level_tol]
    elif half == "lower":
        lams = lams[lams.imag < -level_tol]
    elif half == "real":
        lams = lams[np.abs(lams.imag) <= level_tol]
    else:
        raise DomainError(f"unknown half {half!r}")
    lams = lams[np.argsort(lams.real, kind="stable")]
    if lams.size < 4:
        raise DomainError("progression detection needs at least 4 zeros in the chosen half")
    # levels of (nearly) equal imaginary part
    order = np.argsort(lams.imag, kind="stable")
    groups, cur = [], [order[0]]
    for i, j in zip(order, order[1:]):
        if lams[j].imag - lams[i].imag <= level_tol:
            cur.append(j)
        else:
            groups.append(cur)
            cur = [j]
    groups.append(cur)
    best = max(groups, key=len)
    lv = np.sort_complex(lams[best])
    if lv.size < 4:
        raise DomainError("no level of equal Im lambda holds 4 zeros")
    alpha = float(np.median(np.diff(lv.real)))
    if not alpha > 0:
        raise DomainError("zeros do not separate along the real axis")
    k = np.rint((lv.real - lv[0].real) / alpha)
    beta = complex(np.mean(lv - alpha * k))
    # least squares refinement of alpha and beta on the integer labels
    if np.ptp(k) > 0:
        A = np.vstack([k, np.ones_like(k)]).T
        sol_re = np.linalg.lstsq(A, lv.real, rcond=None)[0]
        alpha = float(sol_re[0])
        beta = complex(sol_re[1], float(np.mean(lv.imag)))
    res = np.abs(lv - (alpha * k + beta))
    # shift so the first zero has k = 0 (already the case) and report
    return ProgressionReport(
        alpha=alpha,
        beta=beta,
        residuals=[float(x) for x in res],
        matched_count=int((res <= tol).sum()),
        matched=bool(np.all(res <= tol)),
        im_beta_nonzero=bool(abs(beta.imag) > tol),
        levels=len(groups),
    )


# ----------------------------------------------------------------------------
# sweeps

PSI_SWEEP_COLUMNS = ("nu", "re_lambda", "im_lambda", "weighted_gap", "region")
ETA_SWEEP_COLUMNS = ("nu", "re_lambda", "im_lambda", "kappa", "eta_ratio", "reference")


def mode_grid(d: int, nu_max: float):
    from .transmission import mode_orders

    return mode_orders(d, nu_max)


def psi_rho_sweep(lams, nus=None, d: int = 3, nu_factor: float = 4.0):
    """Rows of (nu, Re lam, Im lam, weighted_gap, region) and a summary per lambda.

    With ``nus`` None each lambda uses the mode grid up to nu_factor Re(lam).
    Poles are flagged and left out of the sup.
    """
    rows, summary = [], []
    for lam in lams:
        lam = complex(lam)
        grid = mode_grid(d, nu_factor * lam.real) if nus is None else nus
        sup, poles = 0.0, 0
        for nu in grid:
            try:
                v = psi_rho_check(float(nu), lam)
            except PoleError:
                poles += 1
                rows.append((float(nu), lam.real, lam.imag, float("nan"), "pole"))
                continue
            sup = max(sup, v)
            rows.append((float(nu), lam.real, lam.imag, v, region_of_lambda(float(nu), lam).value))
        summary.append({"lambda": [lam.real, lam.imag], "sup": sup, "poles": poles, "n_modes": len(grid)})
    return rows, summary


def eta_decay_sweep(nus, lams, kappa: float):
    """Rows of (nu, Re lam, Im lam, kappa, eta_ratio, reference)."""
    rows = []
    for nu in nus:
        for lam in lams:
            lam = complex(lam)
            lhs, ref = eta_ratio_check(float(nu), lam, kappa)
            rows.append((float(nu), lam.real, lam.imag, kappa, lhs, ref))
    return rows


def decay_slope(rows, nu: float):
    """Slope of log(eta_ratio) against Im lambda for one order."""
    pts = [(r[2], math.log(r[4])) for r in rows if r[0] == nu and r[4] > 0]
    if len(pts) < 2:
        return float("nan")
    x, y = zip(*pts)
    return float(np.polyfit(x, y, 1)[0])


def dn_error_sweep(lams, medium, d: int, nu_max: float | None = None, nu_factor: float = 4.0):
    """Rows of (Re lam, Im lam, nu_max, error)."""
    rows = []
    for lam in lams:
        lam = complex(lam)
        nm = nu_max if nu_max is not None else nu_factor * lam.real
        rows.append((lam.real, lam.imag, nm, dn_approx_error(lam, medium, d, nm)))
    return rows


def bracket(x: float) -> float:
    return math.sqrt(1.0 + x * x)


def default_sigma_grid(lam: complex, n: int = 61, span=(-4.0, 2.0)):
    a2 = abs(lam) ** 2
    return np.concatenate([[0.0], a2 * np.logspace(span[0], span[1], n)])


def g_bound_sweep(pair: MediumPair, lams, sigmas=None, k: int | None = None):
    """Fitted C(lam) = max_sigma |g(sigma)|^{-1} / <sigma/|lam|^2>^{k/2}.

    k defaults to +1 for isotropic pairs and -1 for anisotropic ones.
    Returns (rows, fits) where fits lists (lam, C) and rows hold every sample.
    """
    if pair.condition == VIOLATED:
        raise ConditionError("g bound requires an isotropic or anisotropic pair")
    if k is None:
        k = 1 if pair.condition == "isotropic" else -1
    rows, fits = [], []
    for lam in lams:
        lam = complex(lam)
        grid = default_sigma_grid(lam) if sigmas is None else sigmas
        best = 0.0
        for s in grid:
            g = g_symbol(float(s), lam, pair)
            x = s / abs(lam) ** 2
            c = 1.0 / (abs(g) * bracket(x) ** (k / 2.0))
            rows.append((lam.real, lam.imag, float(s), abs(g), c))
            best = max(best, c)
        fits.append((lam, best))
    return rows, fits, k


def relative_spread(values) -> float:
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / v.min())


# ----------------------------------------------------------------------------
# output


def write_rows_csv(path, columns, rows, header_lines=()):
    with open(path, "w", newline="") as fh:
        for h in header_lines:
            fh.write(f"# {h}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([f"{v:.15g}" if isinstance(v, float) else v for v in r])


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)
