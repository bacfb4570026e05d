"""Turning-point coordinates and large-order uniform approximations.

Conventions used throughout:

* ``w(z) = (1 - z^2)^{1/2}`` is the principal root; on the cut ``z > 1`` the
  value from the upper half plane (``w = -i (z^2-1)^{1/2}``) is used.
* ``phi(z) = log((1 + w)/z) - w`` in the closed upper half plane and
  ``phi(conj z) = conj phi(z)`` below it.
* ``zeta`` is the holomorphic solution of ``(2/3) zeta^{3/2} = phi`` that is
  real on ``(0, inf)``; the upper z half plane maps into the lower zeta half
  plane.  For real ``z > 1`` zeta is returned with imaginary part ``-0.0`` so
  that the principal ``zeta ** 1.5`` reproduces the upper-side phi.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, PoleError
from .scaled import ScaledComplex, arr_mul, arr_normalize, arr_to_scalar
from .specfun import airy_arrays, eta, psi

TURNING_RADIUS = 0.05
TURNING_ORDER = 14
UNIFORM_ANNULUS = (0.1, 10.0)
AIRY_POLE_RATIO = 1e13


class Region(str, enum.Enum):
    THETA0 = "Theta0"
    THETA1 = "Theta1"
    THETA2 = "Theta2"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class RegionParams:
    delta: float = 0.1
    delta1: float | None = None

    def __post_init__(self):
        if not 0.0 < self.delta < 0.3:
            raise DomainError("delta must lie in (0, 0.3)")
        if self.delta1 is None:
            object.__setattr__(self, "delta1", self.delta**2 / 4.0)
        if not 0.0 < self.delta1 <= self.delta:
            raise DomainError("delta1 must lie in (0, delta]")


@dataclass(frozen=True)
class UniformFrame:
    z: complex
    phi: complex
    zeta: complex
    sqrt_one_minus_z2: complex
    region: Region


# ----------------------------------------------------------------------------
# coordinates


def _w_upper(z):
    """(1 - z^2)^{1/2} for Im z >= 0, upper-side value on z > 1."""
    w = np.sqrt(1.0 - z * z)
    cut = (z.imag == 0) & (z.real > 1)
    return np.where(cut, -1j * np.sqrt(np.where(cut, z.real**2 - 1.0, 0.0)), w)


def sqrt_one_minus_z2(z):
    z = np.asarray(z, dtype=complex)
    lower = z.imag < 0
    zu = np.where(lower, np.conj(z), z)
    w = _w_upper(zu)
    return np.where(lower, np.conj(w), w)


@lru_cache(maxsize=1)
def _turning_coefficients():
    """Taylor coefficients of psi(t) = sum g_k t^k / (k + 3/2), phi = t^{3/2} psi(t).

    g(s) = (2 - s)^{1/2} / (1 - s) with t = 1 - z.
    """
    n = TURNING_ORDER + 1
    root = np.zeros(n)  # (1 - s/2)^{1/2}
    c = 1.0
    for k in range(n):
        root[k] = c * (-0.5) ** k
        c = c * (0.5 - k) / (k + 1)
    root *= math.sqrt(2.0)
    g = np.cumsum(root)  # times 1/(1-s)
    return g / (np.arange(n) + 1.5)


def _turning_series(t):
    """Return (zeta, (zeta/(1-z^2))^{1/4}) for z = 1 - t, |t| small."""
    coef = _turning_coefficients()
    ps = np.zeros_like(t)
    for c in coef[::-1]:
        ps = ps * t + c
    base = 1.5 * ps  # close to sqrt(2)
    b23 = np.exp((2.0 / 3.0) * np.log(base))
    ratio4 = np.exp(0.25 * np.log(b23 / (2.0 - t)))
    return t * b23, ratio4


def _coords_upper(z):
    """phi, zeta, w for Im z >= 0 (arrays)."""
    w = _w_upper(z)
    phi = np.log((1.0 + w) / z) - w
    u = 1.5 * phi
    au = np.abs(u)
    arg = np.angle(u)
    arg = np.where(arg > math.pi / 4, arg - 2 * math.pi, arg)
    # real axis: keep zeta exactly real
    real_axis = z.imag == 0
    arg = np.where(real_axis & (z.real <= 1), 0.0, arg)
    arg = np.where(real_axis & (z.real > 1), -1.5 * math.pi, arg)
    zeta = au ** (2.0 / 3.0) * np.exp(1j * (2.0 / 3.0) * arg)
    zeta = np.where(real_axis & (z.real <= 1), _with_imag(zeta.real, 0.0), zeta)
    zeta = np.where(real_axis & (z.real > 1), _with_imag(zeta.real, -0.0), zeta)
    # the upper half plane maps into Im zeta <= 0; drop rounding on the wrong side
    zeta = np.where(zeta.imag > 0, _with_imag(zeta.real, -0.0), zeta)
    near = np.abs(z - 1.0) <= TURNING_RADIUS
    if near.any():
        t = 1.0 - z[near]
        zeta_n, _ = _turning_series(t)
        zr = real_axis[near]
        zeta_n = np.where(zr & (z[near].real > 1), _with_imag(zeta_n.real, -0.0), zeta_n)
        zeta_n = np.where(zr & (z[near].real <= 1), _with_imag(zeta_n.real, 0.0), zeta_n)
        zeta[near] = zeta_n
        with np.errstate(divide="ignore", invalid="ignore"):
            phi_n = (2.0 / 3.0) * np.exp(1.5 * np.log(zeta_n))
        phi[near] = np.where(zeta_n == 0, 0j, phi_n)
    return phi, zeta, w


def _with_imag(re, im):
    out = np.asarray(re, dtype=float).astype(complex)
    out.imag = im
    return out


def _check_domain(z):
    if not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite")
    bad = (z.imag == 0) & (z.real <= 0)
    if bad.any():
        raise DomainError("phi/zeta are undefined on the cut (-inf, 0]")


def coords(z):
    """Vectorized ``(phi, zeta, w)`` for an array of z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_domain(z)
    lower = z.imag < 0
    zu = np.where(lower, np.conj(z), z)
    phi, zeta, w = _coords_upper(zu)
    return (
        np.where(lower, np.conj(phi), phi),
        np.where(lower, np.conj(zeta), zeta),
        np.where(lower, np.conj(w), w),
    )


def rho(z: complex) -> complex:
    """``-i (1 - z^2)^{1/2}`` with the principal root."""
    return complex(-1j * np.sqrt(complex(1.0 - complex(z) ** 2)))


def phi(z: complex) -> complex:
    return complex(coords([z])[0][0])


def zeta(z: complex) -> complex:
    return complex(coords([z])[1][0])


def classify_region(z: complex, params: RegionParams = RegionParams()) -> Region:
    z = complex(z)
    d2 = params.delta**2
    x, y = z.real, abs(z.imag)
    if x <= 0 or y == 0 or y > params.delta1 * x:
        return Region.OUTSIDE
    if x >= 1 + d2:
        return Region.THETA1
    if x <= 1 - d2:
        return Region.THETA2
    return Region.THETA0


def uniform_frame(z: complex, params: RegionParams = RegionParams()) -> UniformFrame:
    p, zt, w = coords([z])
    return UniformFrame(complex(z), complex(p[0]), complex(zt[0]), complex(w[0]), classify_region(z, params))


# ----------------------------------------------------------------------------
# Airy-based quantities


def airy_log_ratio_arrays(sig):
    m, e, mp, ep = airy_arrays(sig)
    sig = np.atleast_1d(np.asarray(sig, dtype=complex))
    if np.any(m == 0):
        raise PoleError("Ai vanishes at the evaluation point", point=complex(sig[m == 0][0]))
    f = (mp / m) * np.exp(ep - e)
    scale = AIRY_POLE_RATIO * (1.0 + np.sqrt(np.abs(sig)))
    bad = ~np.isfinite(f) | (np.abs(f) > scale)
    if bad.any():
        raise PoleError("evaluation point is numerically a zero of Ai", point=complex(sig[bad][0]))
    return f


def airy_log_ratio(sigma: complex) -> complex:
    """F(sigma) = Ai'(sigma)/Ai(sigma)."""
    return complex(airy_log_ratio_arrays([sigma])[0])


def _zeta_powers(zt):
    lz = np.log(zt)
    return np.exp(0.5 * lz), np.exp(1.5 * lz)


def phi_correction_arrays(nu, zt):
    zt = np.atleast_1d(np.asarray(zt, dtype=complex))
    if nu < 1:
        raise DomainError("the correction factor needs nu >= 1")
    if np.any(zt == 0):
        raise DomainError("the correction factor needs zeta != 0")
    f = airy_log_ratio_arrays(nu ** (2.0 / 3.0) * zt)
    z12, z32 = _zeta_powers(zt)
    return nu ** (-1.0 / 3.0) * f / z12 + 1.0 + 1.0 / (4.0 * nu * z32)


def phi_correction(nu: float, zt: complex) -> complex:
    """Phi(zeta) = nu^{-1/3} zeta^{-1/2} F(nu^{2/3} zeta) + 1 + (4 nu zeta^{3/2})^{-1}."""
    return complex(phi_correction_arrays(nu, [zt])[0])


def _ratio4(z, zt, w):
    """(zeta/(1-z^2))^{1/4}, continuous along the positive axis."""
    z = np.asarray(z, dtype=complex)
    lower = z.imag < 0
    zu = np.where(lower, np.conj(z), z)
    ztu = np.where(lower, np.conj(zt), zt)
    wu = np.where(lower, np.conj(w), w)
    ztu = np.where((zu.imag == 0) & (zu.real > 1), _with_imag(ztu.real, -0.0), ztu)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.exp(0.25 * np.log(ztu)) / np.sqrt(wu)
    near = np.abs(zu - 1.0) <= TURNING_RADIUS
    if near.any():
        _, r4 = _turning_series(1.0 - zu[near])
        r[near] = r4
    return np.where(lower, np.conj(r), r)


def bessel_uniform_arrays(nu: float, z):
    """Leading-order uniform approximation of J_nu(nu z) as (mantissa, exponent)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    az = np.abs(z)
    if np.any(az < UNIFORM_ANNULUS[0]) or np.any(az > UNIFORM_ANNULUS[1]):
        raise DomainError("uniform approximation needs 0.1 <= |z| <= 10")
    p, zt, w = coords(z)
    r4 = _ratio4(z, zt, w)
    am, ae, _, _ = airy_arrays(nu ** (2.0 / 3.0) * zt)
    pref = math.sqrt(2.0) * nu ** (-1.0 / 3.0) * r4
    pm, pe = arr_normalize(pref, np.zeros(z.shape))
    return arr_mul(pm, pe, am, ae)


def bessel_uniform(nu: float, z: complex) -> ScaledComplex:
    if nu < 20:
        raise DomainError("uniform approximation is used for nu >= 20")
    m, e = bessel_uniform_arrays(nu, [z])
    return arr_to_scalar(m, e, 0)


def _psi_approx_upper(nu, lam, order):
    lead = rho(nu / lam)
    if order == "leading" or nu < 1:
        return lead
    z = lam / nu
    _, zt, w = coords([z])
    corr = phi_correction_arrays(nu, zt)[0]
    out = complex((w[0] / z) * (1.0 - corr))
    if order == "airy-complete":
        # d/dz log (1 - z^2)^{-1/4} term of the log derivative of the uniform form
        out += z / (2.0 * nu * (1.0 - z * z))
    return out


def psi_approx(nu: float, lam: complex, order: str = "leading") -> complex:
    """Approximation of psi_nu(lam).

    ``leading`` is rho(nu/lam); ``airy-corrected`` multiplies the leading
    term by ``1 - Phi(zeta(lam/nu))`` (remaining correction terms dropped);
    ``airy-complete`` also keeps ``z / (2 nu (1 - z^2))``, z = lam/nu, and
    so is the exact log derivative of the leading uniform form.  Values for
    ``Im lam < 0`` come from ``psi(conj lam) = conj psi(lam)``.
    """
    if order not in ("leading", "airy-corrected", "airy-complete"):
        raise DomainError(f"unknown order {order!r}")
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    if lam.imag < 0:
        return _psi_approx_upper(nu, lam.conjugate(), order).conjugate()
    return _psi_approx_upper(nu, lam, order)


def psi_rho_check(nu: float, lam: complex) -> float:
    """(1 + nu/|lam|) |psi_nu(lam) - rho(nu/lam)|, rho on its Re > 0 branch."""
    lam = complex(lam)
    return (1.0 + nu / abs(lam)) * abs(psi(nu, lam) - psi_approx(nu, lam, "leading"))


def eta_ratio_check(nu: float, lam: complex, kappa: float, c_guess: float | None = None):
    """Return (lhs, |lam|^{1/3} exp(-c_guess |Im lam|)) for the eta bound.

    ``c_guess`` defaults to ``1 - kappa``.
    """
    lam = complex(lam)
    if c_guess is None:
        c_guess = 1.0 - kappa
    e0 = eta(0, nu, lam, kappa)
    p = psi(nu, kappa * lam)
    kl = kappa * lam
    e1 = p * e0
    e2 = e0 * ((nu / kl) ** 2 - 1.0 - p / kl)
    lhs = (1.0 + nu / abs(lam)) ** 2 * abs(e0) + abs(e1) + abs(e2)
    ref = abs(lam) ** (1.0 / 3.0) * math.exp(-c_guess * abs(lam.imag))
    return lhs, ref


def phi_kappa_gap(z: complex, kappa: float) -> complex:
    """Integral of (1 - (tau z)^2)^{1/2} over tau in [kappa, 1]."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0:
        raise DomainError("z must lie off (-inf, 0]")
    if not 0 < kappa < 1:
        raise DomainError("kappa must lie in (0, 1)")

    def f(t):
        return complex(sqrt_one_minus_z2(np.array([t * z]))[0])

    pts = [1.0 / abs(z)] if z.imag == 0 and kappa < 1.0 / abs(z) < 1 else None
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200, points=pts)
    re, _ = integrate.quad(lambda t: f(t).real, kappa, 1.0, **opts)
    im, _ = integrate.quad(lambda t: f(t).imag, kappa, 1.0, **opts)
    return complex(re, im)


def region_of_lambda(nu: float, lam: complex, params: RegionParams = RegionParams()) -> Region:
    if nu <= 0:
        return Region.OUTSIDE
    return classify_region(complex(lam) / nu, params)


BOUND_COLUMNS = ("nu", "re_lambda", "im_lambda", "weighted_gap", "eta_ratio", "region")


def write_bound_csv(rows, path):
    """rows: iterables ordered as BOUND_COLUMNS."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(BOUND_COLUMNS)
        for r in rows:
            wr.writerow([f"{v:.17g}" if isinstance(v, float) else (v.value if isinstance(v, Region) else v) for v in r])


__all__ = [
    "Region",
    "RegionParams",
    "UniformFrame",
    "rho",
    "phi",
    "zeta",
    "coords",
    "classify_region",
    "uniform_frame",
    "airy_log_ratio",
    "phi_correction",
    "bessel_uniform",
    "psi_approx",
    "psi_rho_check",
    "eta_ratio_check",
    "phi_kappa_gap",
    "write_bound_csv",
]
