"""Scaled Bessel J_nu (real order, complex argument) and Airy Ai, Ai'.

Evaluation regimes for ``J_nu(z)`` (``Re z >= 0``; the left half plane is
reached by reflection):

* ``series``   ascending power series, own cancellation estimate;
* ``hankel``   large-argument expansion, adaptively truncated;
* ``integral`` Bessel's integral (Gauss-Legendre), fills the band
  ``12 < |z| < ~2 nu`` near the real axis where neither of the above is
  accurate;
* ``uniform-airy``  leading-order Airy approximation, ``nu >= 20`` only,
  used when every other regime loses more than ``1/nu``.

Each regime returns an error estimate relative to the *envelope* of J,
``max(|J|, e^{|Im z|} (2/(pi|z|))^{1/2} / 2)`` where ``Re z > nu`` and
``|J|`` elsewhere, so points next to real zeros are not penalised.  The
regime with the smallest estimate wins.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError
from .scaled import (
    ScaledComplex,
    arr_add,
    arr_div,
    arr_from_log,
    arr_log_abs,
    arr_mul,
    arr_normalize,
    arr_to_scalar,
)

EPS = np.finfo(float).eps

# regime configuration
SERIES_MAX_TERMS = 500
SERIES_STOP_RATIO = 1e-18
HANKEL_MIN_ABS = 8.0
HANKEL_MAX_TERMS = 60
HANKEL_INTERNAL_TERMS = 400
UNIFORM_MIN_ORDER = 20.0
UNIFORM_RATIO_RANGE = (0.1, 10.0)
ACCEPT_EARLY = 1e-13
SEAM_DISAGREEMENT = 1e-8

AIRY_ASYMPTOTIC_RADIUS = 9.0
AIRY_CONNECTION_ARG = 2.0 * math.pi / 3.0
AIRY_MACLAURIN_MAX_LOSS = 10.0
AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840

CF_TINY = 1e-300
CF_MAX_ITER = 10_000

METHOD_NAMES = ("series", "hankel", "integral", "uniform-airy")
SERIES, HANKEL, INTEGRAL, UNIFORM = range(4)


class SeamWarning(UserWarning):
    """Two regimes disagree at a seam point beyond SEAM_DISAGREEMENT."""


@dataclass(frozen=True)
class BesselEvalReport:
    value: ScaledComplex
    method: str
    est_rel_error: float

    def __complex__(self):
        return self.value.value()


@dataclass(frozen=True)
class HankelCoefficients:
    order: float
    coefficients: tuple
    count: int


def hankel_coefficients(nu: float, count: int) -> HankelCoefficients:
    """``A_0(nu) .. A_{count-1}(nu)`` of the large-argument expansion."""
    return HankelCoefficients(float(nu), tuple(_hankel_coefs(float(nu), int(count))), int(count))


@lru_cache(maxsize=256)
def _hankel_coefs(nu: float, count: int) -> tuple:
    out = [1.0]
    a = 1.0
    mu = 4.0 * nu * nu
    for s in range(1, count):
        a = a * (mu - (2 * s - 1) ** 2) / (8.0 * s)
        out.append(a)
    return tuple(out[:count])


# ----------------------------------------------------------------------------
# Airy


def _airy_asymptotic(sig):
    """Ai, Ai' from the large-|sigma| expansion (used for |arg sigma| <= 2pi/3)."""
    sig = np.asarray(sig, dtype=complex)
    logsig = np.log(sig)
    xi = (2.0 / 3.0) * np.exp(1.5 * logsig)
    s_ai = np.ones_like(sig)
    s_aip = np.ones_like(sig)
    u = 1.0
    term = np.ones_like(sig)
    prev = np.full(sig.shape, np.inf)
    active = np.ones(sig.shape, dtype=bool)
    for k in range(1, 60):
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * (2 * k - 1) * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = (-1.0) ** k / xi**k
        mag = np.abs(u * term)
        active &= mag < prev
        s_ai = s_ai + np.where(active, u * term, 0)
        s_aip = s_aip + np.where(active, v * term, 0)
        active &= mag > 1e-18
        prev = mag
        if not active.any():
            break
    c = math.log(2.0 * math.sqrt(math.pi))
    log_ai = -xi - c - 0.25 * logsig + np.log(s_ai)
    log_aip = -xi - c + 0.25 * logsig + np.log(-s_aip)
    m1, e1 = arr_from_log(log_ai)
    m2, e2 = arr_from_log(log_aip)
    return m1, e1, m2, e2


def _airy_far(sig):
    """|sigma| >= radius: asymptotic inside the sector, connection formula outside."""
    sig = np.asarray(sig, dtype=complex)
    out = [np.zeros(sig.shape, complex), np.zeros(sig.shape), np.zeros(sig.shape, complex), np.zeros(sig.shape)]
    inside = np.abs(np.angle(sig)) <= AIRY_CONNECTION_ARG
    if inside.any():
        r = _airy_asymptotic(sig[inside])
        for o, v in zip(out, r):
            o[inside] = v
    outside = ~inside
    if outside.any():
        s = -sig[outside]
        wp = cmath.exp(1j * math.pi / 3)
        wm = cmath.exp(-1j * math.pi / 3)
        ap_m, ap_e, app_m, app_e = _airy_asymptotic(s * wp)
        am_m, am_e, amp_m, amp_e = _airy_asymptotic(s * wm)
        ai = arr_add(wp * ap_m, ap_e, wm * am_m, am_e)
        aip = arr_add(-wp * wp * app_m, app_e, -wm * wm * amp_m, amp_e)
        out[0][outside], out[1][outside] = ai
        out[2][outside], out[3][outside] = aip
    return tuple(out)


def _airy_maclaurin(sig):
    """Maclaurin series; returns (ai, aip, loss) as plain complex values."""
    sig = np.asarray(sig, dtype=complex)
    s3 = sig**3
    f = np.ones_like(sig)
    g = sig.copy()
    fp = np.zeros_like(sig)
    gp = np.ones_like(sig)
    a = np.ones_like(sig)
    b = sig.copy()
    d = 0.5 * sig**2
    e = np.ones_like(sig)
    af = np.abs(f) * abs(AI0) + np.abs(g) * abs(AIP0)
    for k in range(1, 80):
        a = a * s3 / ((3 * k - 1) * (3 * k))
        b = b * s3 / ((3 * k) * (3 * k + 1))
        if k > 1:
            d = d * s3 / ((3 * k - 1) * (3 * k - 3))
        e = e * s3 / ((3 * k) * (3 * k - 2))
        f = f + a
        g = g + b
        fp = fp + d
        gp = gp + e
        af = af + np.abs(a) * abs(AI0) + np.abs(b) * abs(AIP0)
        if np.all(np.abs(a) + np.abs(b) + np.abs(d) + np.abs(e) <= 1e-18 * (np.abs(f) + np.abs(g) + 1e-300)):
            break
    ai = AI0 * f + AIP0 * g
    aip = AI0 * fp + AIP0 * gp
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = af / np.abs(ai)
    loss = np.where(np.isfinite(loss), loss, np.inf)
    return ai, aip, loss


def _airy_bridge(sig):
    """Taylor expansion about the point of modulus ``radius`` on the same ray."""
    sig = np.asarray(sig, dtype=complex)
    absig = np.abs(sig)
    unit = np.where(absig > 0, sig / np.where(absig > 0, absig, 1.0), 1.0)
    s0 = AIRY_ASYMPTOTIC_RADIUS * unit
    m0, e0, m1, e1 = _airy_far(s0)
    a_prev = m0.copy()  # a_0, common exponent e0
    a_cur = m1 * np.exp(e1 - e0)  # a_1
    h = sig - s0
    tot = a_prev + a_cur * h
    dtot = a_cur.copy()
    absum = np.abs(a_prev) + np.abs(a_cur * h)
    coefs = [a_prev, a_cur]
    hp = h.copy()
    for n in range(0, 300):
        nxt = (s0 * coefs[-2] + (coefs[-3] if len(coefs) > 2 else 0)) / ((n + 1) * (n + 2))
        coefs.append(nxt)
        k = len(coefs) - 1
        dtot = dtot + k * nxt * hp
        hp = hp * h
        t = nxt * hp
        tot = tot + t
        absum = absum + np.abs(t)
        if k > 20 and np.all(np.abs(t) <= 1e-18 * np.abs(tot)) and np.all(np.abs(k * nxt * hp / h) <= 1e-18 * np.abs(dtot)):
            break
    ai = arr_normalize(tot, e0)
    aip = arr_normalize(dtot, e0)
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = absum / np.abs(tot)
    return ai[0], ai[1], aip[0], aip[1], loss


def airy_arrays(sig):
    """Vectorized scaled Airy pair: returns (m_ai, e_ai, m_aip, e_aip)."""
    sig = np.atleast_1d(np.asarray(sig, dtype=complex))
    if not np.all(np.isfinite(sig)):
        raise DomainError("Airy argument must be finite")
    m_ai = np.zeros(sig.shape, complex)
    e_ai = np.zeros(sig.shape)
    m_aip = np.zeros(sig.shape, complex)
    e_aip = np.zeros(sig.shape)
    far = np.abs(sig) >= AIRY_ASYMPTOTIC_RADIUS
    if far.any():
        r = _airy_far(sig[far])
        m_ai[far], e_ai[far], m_aip[far], e_aip[far] = r
    near = ~far
    if near.any():
        sn = sig[near]
        ai, aip, loss = _airy_maclaurin(sn)
        a_m, a_e = arr_normalize(ai, np.zeros(sn.shape))
        p_m, p_e = arr_normalize(aip, np.zeros(sn.shape))
        bad = loss > AIRY_MACLAURIN_MAX_LOSS
        if bad.any():
            bm, be, bpm, bpe, bloss = _airy_bridge(sn[bad])
            use = bloss < loss[bad]
            idx = np.flatnonzero(bad)[use]
            a_m[idx], a_e[idx], p_m[idx], p_e[idx] = bm[use], be[use], bpm[use], bpe[use]
        m_ai[near], e_ai[near], m_aip[near], e_aip[near] = a_m, a_e, p_m, p_e
    return m_ai, e_ai, m_aip, e_aip


def airy_ai(sigma: complex) -> ScaledComplex:
    m, e, _, _ = airy_arrays([sigma])
    return arr_to_scalar(m, e, 0)


def airy_ai_prime(sigma: complex) -> ScaledComplex:
    _, _, m, e = airy_arrays([sigma])
    return arr_to_scalar(m, e, 0)


# ----------------------------------------------------------------------------
# Bessel J: regimes


def _envelope_log(nu, z, log_absj):
    """log of the error-normalising envelope (see module docstring)."""
    az = np.maximum(np.abs(z), 1e-300)
    osc = z.real > nu
    w = np.abs(z.imag) + 0.5 * np.log(2.0 / (math.pi * np.maximum(az, 1.0))) - math.log(2.0)
    return np.where(osc, np.maximum(log_absj, w), log_absj)


def _series(nu, z):
    """Ascending series.  Returns (m, e, abs_err_log)."""
    z = np.asarray(z, dtype=complex)
    q = -(z * z) / 4.0
    s = np.ones_like(z)
    t = np.ones_like(z)
    tabs = np.ones(z.shape)
    for k in range(1, SERIES_MAX_TERMS):
        t = t * q / (k * (nu + k))
        s = s + t
        at = np.abs(t)
        tabs = tabs + at
        if k * (nu + k) > np.max(np.abs(q)) and np.all(at <= SERIES_STOP_RATIO * np.maximum(np.abs(s), 1e-300)):
            break
    trunc = np.abs(t)
    zero = z == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        logpref = nu * np.log(np.where(zero, 1.0, z / 2.0)) - math.lgamma(nu + 1.0)
    m, e = arr_normalize(s, logpref.real)
    m = m * np.exp(1j * logpref.imag)
    if nu > 0:
        m = np.where(zero, 0j, m)
        e = np.where(zero, 0.0, e)
    err_log = logpref.real + np.log(EPS * (4 * tabs + np.abs(logpref) * np.abs(s)) + trunc)
    if nu > 0:
        err_log = np.where(zero, -np.inf, err_log)
    return m, e, err_log


def _hankel_pieces(nu, z, sign, nterms=None):
    """Truncated q^{sign}_nu(z).  Returns (q, relerr) as plain arrays.

    With ``nterms`` given the sum is exactly that long.  Otherwise it runs to
    the smallest term past ``s ~ nu`` (terms may grow before that point) or
    until terms drop below 1e-17 of the sum.
    """
    z = np.asarray(z, dtype=complex)
    if nterms is None:
        count = int(min(HANKEL_INTERNAL_TERMS, nu + 2.5 * float(np.max(np.abs(z))) + 10))
    else:
        count = int(nterms)
    coefs = _hankel_coefs(float(nu), max(count, 1))
    x = sign * 1j / z
    acc = np.ones_like(z)
    p = np.ones_like(z)
    prev = np.ones(z.shape)
    biggest = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    last = np.zeros(z.shape)
    for s in range(1, count):
        p = p * x
        term = coefs[s] * p
        mag = np.abs(term)
        if nterms is None and 2 * s - 1 > 2 * nu + 2:
            active &= ~(mag > prev)
        acc = acc + np.where(active, term, 0)
        biggest = np.where(active, np.maximum(biggest, mag), biggest)
        last = np.where(active, mag, last)
        if nterms is None:
            active &= ~((mag <= 1e-17 * np.abs(acc)) & (2 * s - 1 > 2 * nu))
            if not active.any():
                break
        prev = mag
    if nterms is None:
        # still active at the cap: the sum has not settled
        last = np.where(active, np.inf, last)
    phase = cmath.exp(sign * 1j * (-nu * math.pi / 2 - math.pi / 4))
    q = phase * acc
    relerr = (last + 8 * EPS * biggest) / np.abs(acc)
    return q, relerr


def _hankel(nu, z):
    """J from H^+ and H^-; Re z > 0 assumed.  Returns (m, e, abs_err_log)."""
    z = np.asarray(z, dtype=complex)
    qp, ep = _hankel_pieces(nu, z, +1)
    qm, em = _hankel_pieces(nu, z, -1)
    base = 0.5 * np.log(2.0 / (math.pi * z))
    lp = base + 1j * z + np.log(qp) - math.log(2.0)
    lm = base - 1j * z + np.log(qm) - math.log(2.0)
    mp_, ep_ = arr_from_log(lp)
    mm_, em_ = arr_from_log(lm)
    m, e = arr_add(mp_, ep_, mm_, em_)
    err_log = np.logaddexp(lp.real + np.log(ep), lm.real + np.log(em))
    return m, e, err_log


def _integral(nu, z):
    """Bessel's integral (Re z > 0).  Returns (m, e, abs_err_log)."""
    z = np.asarray(z, dtype=complex)
    az = np.abs(z)
    n1 = int(min(4000, 1.1 * (nu + float(np.max(az))) + 40))
    x, w = np.polynomial.legendre.leggauss(n1)
    th = 0.5 * math.pi * (x + 1.0)
    wt = 0.5 * math.pi * w
    shift = np.abs(z.imag)[:, None]
    arg = nu * th[None, :] - z[:, None] * np.sin(th)[None, :]
    with np.errstate(over="ignore", under="ignore"):
        integrand = 0.5 * (np.exp(1j * arg - shift) + np.exp(-1j * arg - shift))
    i1 = (integrand * wt[None, :]).sum(axis=1) / math.pi  # times e^{|Im z|}
    total_m, total_e = arr_normalize(i1, np.abs(z.imag))
    err_log = np.abs(z.imag) + math.log(64 * EPS)
    nf = math.sin(nu * math.pi)
    ok = np.ones(z.shape, dtype=bool)
    if abs(nf) > 1e-15:
        rez = np.maximum(z.real, 1e-300)
        tmax = np.arcsinh(40.0 / rez)
        if nu > 0:
            tmax = np.minimum(tmax, 40.0 / nu)
        osc = np.abs(z.imag) * np.sinh(tmax)
        ok = osc < 6000
        n2 = int(min(4000, 40 + 1.2 * float(np.max(np.where(ok, osc, 0.0)))))
        x2, w2 = np.polynomial.legendre.leggauss(n2)
        t = 0.5 * tmax[:, None] * (x2[None, :] + 1.0)
        wt2 = 0.5 * tmax[:, None] * w2[None, :]
        with np.errstate(over="ignore", under="ignore"):
            f2 = np.exp(-z[:, None] * np.sinh(t) - nu * t)
        i2 = -(nf / math.pi) * (f2 * wt2).sum(axis=1)
        m2, e2 = arr_normalize(i2, np.zeros(z.shape))
        total_m, total_e = arr_add(total_m, total_e, m2, e2)
    err_log = np.where(ok, err_log, np.inf)
    return total_m, total_e, err_log


def _uniform(nu, z):
    from .uniform import bessel_uniform_arrays

    z = np.asarray(z, dtype=complex)
    m, e = bessel_uniform_arrays(nu, z / nu)
    err_log = arr_log_abs(m, e) - math.log(nu)
    return m, e, err_log


def _select(nu, z, force=None):
    """Evaluate J_nu on an array with Re z >= 0.  Returns (m, e, method, err)."""
    n = z.size
    best_m = np.zeros(n, complex)
    best_e = np.zeros(n)
    best_err = np.full(n, np.inf)
    best_method = np.full(n, -1, dtype=int)

    def consider(mask, fn, code):
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return
        m, e, err_log = fn(nu, z[idx])
        env = _envelope_log(nu, z[idx], arr_log_abs(m, e))
        with np.errstate(invalid="ignore"):
            rel = np.exp(np.minimum(err_log - env, 700.0))
        rel = np.where(np.isfinite(rel), rel, np.inf)
        if force is not None:
            better = np.ones(idx.size, dtype=bool)
        else:
            better = rel < best_err[idx]
        j = idx[better]
        best_m[j], best_e[j], best_err[j], best_method[j] = m[better], e[better], rel[better], code

    az = np.abs(z)
    if force is None or force == "hankel":
        consider((az >= HANKEL_MIN_ABS) if force is None else (az > 0), _hankel, HANKEL)
    if force is None or force == "series":
        consider(best_err > ACCEPT_EARLY if force is None else np.ones(n, bool), _series, SERIES)
    if force is None or force == "integral":
        mask = (best_err > ACCEPT_EARLY) & (z.real > 0) & (az > 1.0)
        consider(mask if force is None else (z.real > 0), _integral, INTEGRAL)
    if nu >= UNIFORM_MIN_ORDER and (force is None or force == "uniform-airy"):
        ratio = az / nu
        mask = (ratio >= UNIFORM_RATIO_RANGE[0]) & (ratio <= UNIFORM_RATIO_RANGE[1])
        if force is None:
            mask &= best_err > 1.0 / nu
        consider(mask, _uniform, UNIFORM)
    return best_m, best_e, best_method, best_err


def bessel_j_arrays(nu: float, z, force: str | None = None):
    """Vectorized J_nu(z).

    Returns ``(mantissa, exponent, method_code, est_rel_error)`` arrays;
    ``METHOD_NAMES[code]`` gives the regime.  ``force`` pins one regime
    (used by the seam tests).
    """
    nu = float(nu)
    if nu < 0 or not math.isfinite(nu):
        raise DomainError(f"order must be real and >= 0, got {nu}")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    shape = z.shape
    z = z.ravel()
    if not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite")
    left = z.real < 0
    zr = np.where(left, -z, z)
    m, e, meth, err = _select(nu, zr, force)
    if left.any():
        # J_nu(z) = e^{+-i nu pi} J_nu(-z), sign following arg z
        sgn = np.where(z.imag >= 0, 1.0, -1.0)
        m = np.where(left, m * np.exp(1j * nu * math.pi * sgn), m)
    return m.reshape(shape), e.reshape(shape), meth.reshape(shape), err.reshape(shape)


def bessel_j(nu: float, z: complex) -> BesselEvalReport:
    """J_nu(z) with the regime used and an error estimate."""
    m, e, meth, err = bessel_j_arrays(nu, [z])
    if meth[0] < 0:
        raise DomainError(f"no evaluation regime covers nu={nu}, z={z}")
    val = arr_to_scalar(m, e, 0)
    _seam_check(nu, complex(z), val, int(meth[0]))
    return BesselEvalReport(val, METHOD_NAMES[meth[0]], float(err[0]))


def _seam_check(nu, z, val, code):
    """Warn when series and Hankel both claim the point and disagree."""
    az = abs(z)
    if code not in (SERIES, HANKEL) or not (HANKEL_MIN_ABS <= az <= 1.1 * HANKEL_MIN_ABS):
        return
    other = "series" if code == HANKEL else "hankel"
    m, e, meth, err = bessel_j_arrays(nu, [z], force=other)
    if err[0] > 1e-10:
        return
    alt = arr_to_scalar(m, e, 0)
    diff = abs((val - alt).value()) / max(abs(val.value()), 1e-300)
    if diff > SEAM_DISAGREEMENT:
        warnings.warn(f"regime seam disagreement {diff:.2e} at nu={nu}, z={z}", SeamWarning, stacklevel=3)


def bessel_j_prime_arrays(nu: float, z):
    """J'_nu(z) = (nu/z) J_nu(z) - J_{nu+1}(z) in scaled arithmetic."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z == 0):
        raise DomainError("J'_nu needs z != 0")
    m0, e0, c0, r0 = bessel_j_arrays(nu, z)
    m1, e1, c1, r1 = bessel_j_arrays(nu + 1.0, z)
    a_m, a_e = arr_normalize(m0 * (nu / z), e0)
    m, e = arr_add(a_m, a_e, -m1, e1)
    return m, e, np.maximum(c0, c1), np.maximum(r0, r1)


def bessel_j_prime(nu: float, z: complex) -> BesselEvalReport:
    m, e, meth, err = bessel_j_prime_arrays(nu, [z])
    return BesselEvalReport(arr_to_scalar(m, e, 0), METHOD_NAMES[meth[0]], float(err[0]))


# ----------------------------------------------------------------------------
# ratios


def bessel_ratio_cf(nu, z):
    """J_{nu+1}(z)/J_nu(z) by the modified Lentz algorithm.

    ``nu`` may be an array (broadcast against scalar ``z``).  Raises
    PoleError when the fraction fails to converge or the ratio blows up.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    z = complex(z)
    if z == 0:
        raise DomainError("ratio needs z != 0")
    # J_{nu+1}/J_nu = 1/(b_1 - 1/(b_2 - ...)),  b_k = 2(nu+k)/z
    f = np.full(nu.shape, CF_TINY, dtype=complex)
    c = f.copy()
    d = np.zeros(nu.shape, dtype=complex)
    done = np.zeros(nu.shape, dtype=bool)
    for k in range(1, CF_MAX_ITER + 1):
        a = 1.0 if k == 1 else -1.0
        b = 2.0 * (nu + k) / z
        d = b + a * d
        d = np.where(np.abs(d) < CF_TINY, CF_TINY, d)
        c = b + a / c
        c = np.where(np.abs(c) < CF_TINY, CF_TINY, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all() and k > 2:
            break
    if not done.all():
        bad = nu[~done][0]
        raise PoleError(f"continued fraction did not converge for nu={bad}, z={z}", nu=float(bad), point=z)
    scale = 1e13 * np.maximum(1.0, np.abs(nu / z))
    if np.any(~np.isfinite(f)) or np.any(np.abs(f) > scale):
        bad = nu[~np.isfinite(f) | (np.abs(f) > scale)][0]
        raise PoleError(f"z={z} is numerically a zero of J_{bad}", nu=float(bad), point=z)
    return f


def psi_arrays(nu, lam):
    """psi_nu(lam) = J'_nu/J_nu for an array of orders at one point."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    lam = complex(lam)
    if lam == 0:
        raise DomainError("psi needs lambda != 0")
    if np.any(nu < 0):
        raise DomainError("orders must be >= 0")
    return nu / lam - bessel_ratio_cf(nu, lam)


def psi(nu: float, lam: complex) -> complex:
    """Logarithmic derivative J'_nu(lam)/J_nu(lam)."""
    return complex(psi_arrays([nu], lam)[0])


def eta(k: int, nu: float, lam: complex, kappa: float) -> complex:
    """``J^{(k)}_nu(kappa lam) / J_nu(lam)`` for k in {0, 1, 2}."""
    if k not in (0, 1, 2):
        raise DomainError("k must be 0, 1 or 2")
    if not 0.0 < kappa < 1.0:
        raise DomainError("kappa must lie in (0, 1)")
    lam = complex(lam)
    if lam == 0:
        raise DomainError("eta needs lambda != 0")
    m, e, _, _ = bessel_j_arrays(nu, [kappa * lam, lam])
    num = arr_to_scalar(m, e, 0)
    den = arr_to_scalar(m, e, 1)
    if den.is_zero() or (num.log_abs() - den.log_abs()) > 700:
        raise PoleError(f"J_{nu} vanishes at {lam}", nu=nu, point=lam)
    e0 = num.ratio(den)
    if k == 0:
        return e0
    p = psi(nu, kappa * lam)
    if k == 1:
        return p * e0
    kl = kappa * lam
    # J'' = -J'/z - (1 - nu^2/z^2) J
    return e0 * ((nu / kl) ** 2 - 1.0 - p / kl)


def hankel_q(sign: int, nu: float, lam: complex, S: int) -> complex:
    """S-term truncation of q^{sign}_nu(lam)."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    lam = complex(lam)
    if abs(lam) < max(2 * nu * nu, 10.0):
        raise DomainError(f"|lambda| = {abs(lam)} below the asymptotic guard max(2 nu^2, 10)")
    if S < 1 or S > HANKEL_MAX_TERMS:
        raise DomainError(f"S must lie in [1, {HANKEL_MAX_TERMS}]")
    q, _ = _hankel_pieces(nu, np.array([lam]), sign, nterms=S)
    return complex(q[0])


def accuracy_atlas(nus, zs):
    """Rows (nu, re z, im z, method, est_rel_error) for documentation dumps."""
    rows = []
    for nu in nus:
        m, e, meth, err = bessel_j_arrays(nu, zs)
        for z, c, r in zip(np.atleast_1d(zs), meth, err):
            rows.append((float(nu), float(z.real), float(z.imag), METHOD_NAMES[c], float(r)))
    return rows
