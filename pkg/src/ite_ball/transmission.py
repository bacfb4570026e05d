"""Modes, media and the per-mode characteristic functions of the ball problem.

For a pair of media on the unit ball in R^d and a spherical-harmonic degree
``l`` the transmission eigenvalues contributed by that mode are the zeros of

    D(lam) = c1 lam1 J'(lam1) J(lam2) - c2 lam2 J'(lam2) J(lam1)
             + (c2 - c1) (d-2)/2 J(lam1) J(lam2),

``lam_j = s_j lam``, ``s_j = sqrt(n_j / c_j)``, ``J = J_nu`` with
``nu = l + d/2 - 1``.  It is the 2x2 boundary determinant of the radial
solutions ``r^{-(d-2)/2} J_nu(s_j lam r)`` under ``u1 = u2`` and
``c1 du1/dr = c2 du2/dr``.  ``char_det_radial`` computes the same
determinant by integrating the radial ODE, which also covers variable
profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import comb

from .errors import ConditionError, DomainError, IntegratorError, PoleError
from .scaled import ScaledComplex, arr_add, arr_normalize, arr_to_scalar
from .specfun import bessel_j_arrays, psi_arrays
from .uniform import rho


@dataclass(frozen=True)
class Mode:
    l: int
    d: int
    nu: float
    mu2: float
    multiplicity: int


def harmonic_dimension(l: int, d: int) -> int:
    """Dimension of degree-l spherical harmonics on S^{d-1}."""

    def c(n, k):
        return int(comb(n, k, exact=True)) if n >= 0 and k >= 0 else 0

    return c(l + d - 1, l) - c(l + d - 3, l - 2)


def make_mode(l: int, d: int) -> Mode:
    if l < 0 or d < 2:
        raise DomainError("need l >= 0 and d >= 2")
    return Mode(int(l), int(d), l + d / 2.0 - 1.0, float(l * (l + d - 2)), harmonic_dimension(l, d))


# ----------------------------------------------------------------------------
# media


@dataclass(frozen=True)
class Medium:
    c: float
    n: float

    def __post_init__(self):
        if not (self.c > 0 and self.n > 0):
            raise DomainError("c and n must be positive")

    @property
    def s(self) -> float:
        return math.sqrt(self.n / self.c)

    @property
    def boundary_constants(self):
        return self.c, self.n


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1.  Returns (value, derivative)."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, 1e-12, 1 - 1e-12)
    a = np.exp(-1.0 / xc)
    b = np.exp(-1.0 / (1.0 - xc))
    val = a / (a + b)
    da = a / xc**2
    db = -b / (1.0 - xc) ** 2
    dval = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    inside = (x > 0) & (x < 1)
    return np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, val)), np.where(inside, dval, 0.0)


@dataclass(frozen=True)
class ProfileFunction:
    """A radial coefficient: polynomial core blended to a boundary constant.

    ``coeffs`` are ``a0, a1, a2, ...`` of ``a0 + a1 r + a2 r^2 + ...``; for
    ``r >= 1 - flat`` the value is the constant ``p(1 - flat)``, reached by a
    smooth blend over ``[1 - 1.5 flat, 1 - flat]``.
    """

    coeffs: tuple
    flat: float = 0.1

    @property
    def boundary_value(self) -> float:
        return float(np.polynomial.polynomial.polyval(1.0 - self.flat, self.coeffs))

    @property
    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __call__(self, r):
        v, _ = self.value_and_derivative(r)
        return v

    def value_and_derivative(self, r):
        r = np.asarray(r, dtype=float)
        p = np.polynomial.polynomial.polyval(r, self.coeffs)
        dp = np.polynomial.polynomial.polyval(r, np.polynomial.polynomial.polyder(self.coeffs)) if len(self.coeffs) > 1 else 0.0 * r
        if self.is_constant:
            return p, dp
        start = 1.0 - 1.5 * self.flat
        b, db = smooth_step((r - start) / (0.5 * self.flat))
        db = db / (0.5 * self.flat)
        pt = self.boundary_value
        return p * (1 - b) + pt * b, dp * (1 - b) + (pt - p) * db


@dataclass(frozen=True)
class RadialProfile:
    c: ProfileFunction
    n: ProfileFunction
    flat_radius: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.flat_radius < 1.0:
            raise DomainError("flat radius must lie in (0, 1)")
        rr = np.linspace(1e-6, 1.0, 401)
        if np.any(self.c(rr) <= 0) or np.any(self.n(rr) <= 0):
            raise DomainError("profiles must stay positive on (0, 1]")
        tail = rr[rr >= 1.0 - self.flat_radius]
        ct, nt = self.boundary_constants
        if np.max(np.abs(self.c(tail) - ct)) > 1e-12 or np.max(np.abs(self.n(tail) - nt)) > 1e-12:
            raise DomainError("profiles must be constant for r >= 1 - flat_radius")

    @property
    def boundary_constants(self):
        return self.c.boundary_value, self.n.boundary_value

    @property
    def s(self) -> float:
        c, n = self.boundary_constants
        return math.sqrt(n / c)


def as_profile(m, flat: float = 0.1) -> RadialProfile:
    if isinstance(m, RadialProfile):
        return m
    return RadialProfile(ProfileFunction((m.c,), flat), ProfileFunction((m.n,), flat), flat)


def parse_coefficient(text: str, flat: float = 0.1):
    """``'2.5'`` -> float, ``'constant:2.5'`` -> float, ``'poly:a0,a1,a2'`` -> ProfileFunction."""
    t = text.strip()
    if t.startswith("constant:"):
        return float(t.split(":", 1)[1])
    if t.startswith("poly:"):
        coeffs = tuple(float(x) for x in t.split(":", 1)[1].split(","))
        return ProfileFunction(coeffs, flat)
    try:
        return float(t)
    except ValueError:
        raise DomainError(f"cannot parse coefficient {text!r}") from None


def parse_medium(c_text: str, n_text: str, flat: float = 0.1):
    c = parse_coefficient(c_text, flat)
    n = parse_coefficient(n_text, flat)
    if isinstance(c, float) and isinstance(n, float):
        return Medium(c, n)
    if isinstance(c, float):
        c = ProfileFunction((c,), flat)
    if isinstance(n, float):
        n = ProfileFunction((n,), flat)
    return RadialProfile(c, n, flat)


ISOTROPIC = "isotropic"
ANISOTROPIC = "anisotropic"
VIOLATED = "violated"


@dataclass(frozen=True)
class MediumPair:
    media: tuple
    d: int = 3

    @property
    def condition(self) -> str:
        (c1, n1), (c2, n2) = (m.boundary_constants for m in self.media)
        if c1 == c2 and n1 != n2:
            return ISOTROPIC
        if (c1 - c2) * (c1 * n1 - c2 * n2) < 0:
            return ANISOTROPIC
        return VIOLATED

    @property
    def is_constant(self) -> bool:
        return all(isinstance(m, Medium) for m in self.media)


# ----------------------------------------------------------------------------
# characteristic determinant, Bessel form


def _bessel_and_prime(nu, x):
    """J_nu(x), J'_nu(x) on a common exponent: returns (J, P, E) with values J e^E, P e^E."""
    mj, ej, _, _ = bessel_j_arrays(nu, x)
    m1, e1, _, _ = bessel_j_arrays(nu + 1.0, x)
    pm, pe = arr_add(mj * (nu / x), ej, -m1, e1)
    big = np.maximum(np.where(mj != 0, ej, -np.inf), np.where(pm != 0, pe, -np.inf))
    big = np.where(np.isfinite(big), big, 0.0)
    with np.errstate(under="ignore"):
        j = np.where(mj != 0, mj * np.exp(np.minimum(ej - big, 0.0)), 0j)
        p = np.where(pm != 0, pm * np.exp(np.minimum(pe - big, 0.0)), 0j)
    return j, p, big


def _constant_params(pair: MediumPair):
    if not pair.is_constant:
        raise DomainError("Bessel form needs constant media; use char_det_radial")
    (c1, n1), (c2, n2) = (m.boundary_constants for m in pair.media)
    return c1, c2, math.sqrt(n1 / c1), math.sqrt(n2 / c2)


def char_det_arrays(mode: Mode, lam, pair: MediumPair, derivative: bool = False):
    """D(lam) (and D'(lam) if requested) on an array, as (mantissa, exponent) pairs."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if np.any(lam == 0):
        raise DomainError("lambda must be nonzero")
    c1, c2, s1, s2 = _constant_params(pair)
    nu = mode.nu
    k = (c2 - c1) * (mode.d - 2) / 2.0
    l1, l2 = s1 * lam, s2 * lam
    j1, p1, e1 = _bessel_and_prime(nu, l1)
    j2, p2, e2 = _bessel_and_prime(nu, l2)
    base = e1 + e2
    d = c1 * l1 * p1 * j2 - c2 * l2 * p2 * j1 + k * j1 * j2
    m, e = arr_normalize(d, base)
    if not derivative:
        return m, e
    dd = (
        -c1 * s1 * (l1 - nu * nu / l1) * j1 * j2
        + c1 * l1 * p1 * s2 * p2
        + c2 * s2 * (l2 - nu * nu / l2) * j2 * j1
        - c2 * l2 * p2 * s1 * p1
        + k * (s1 * p1 * j2 + s2 * j1 * p2)
    )
    dm, de = arr_normalize(dd, base)
    return m, e, dm, de


def char_det_constant(mode: Mode, lam: complex, pair: MediumPair) -> ScaledComplex:
    m, e = char_det_arrays(mode, [lam], pair)
    return arr_to_scalar(m, e, 0)


def char_det_constant_derivative(mode: Mode, lam: complex, pair: MediumPair) -> ScaledComplex:
    _, _, m, e = char_det_arrays(mode, [lam], pair, derivative=True)
    return arr_to_scalar(m, e, 0)


# ----------------------------------------------------------------------------
# characteristic determinant, radial shooting


@dataclass(frozen=True)
class IntegratorSettings:
    rtol: float = 1e-10
    atol: float = 1e-12
    r0: float = 1e-3
    method: str = "DOP853"
    max_step: float = np.inf


def _shoot(mode: Mode, lam, medium: RadialProfile, st: IntegratorSettings):
    """Regular radial solution at r = 1 for every lam: returns (v, v')."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    k0 = (mode.d - 2) / 2.0
    nu, mu2, dm1 = mode.nu, mode.mu2, mode.d - 1
    c0, n0 = float(medium.c(0.0)), float(medium.n(0.0))
    r0 = st.r0
    # start from the constant-coefficient solution r^{-k0} J_nu(s0 lam r),
    # scaled to v(r0) = 1
    x0 = math.sqrt(n0 / c0) * lam * r0
    dlog = -k0 / r0 + math.sqrt(n0 / c0) * lam * psi_start(nu, x0)
    y0 = np.concatenate([np.ones_like(lam), dlog])
    lam2 = lam * lam
    npts = lam.size

    def rhs(r, y):
        v, w = y[:npts], y[npts:]
        c, dc = medium.c.value_and_derivative(r)
        n = medium.n(r)
        acc = -((dc + c * dm1 / r) * w - c * mu2 * v / (r * r) + lam2 * n * v) / c
        return np.concatenate([w, acc])

    sol = solve_ivp(rhs, (r0, 1.0), y0, method=st.method, rtol=st.rtol, atol=st.atol, max_step=st.max_step)
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        raise IntegratorError(f"radial integration failed: {sol.message}")
    y = sol.y[:, -1]
    return y[:npts], y[npts:]


def psi_start(nu, x):
    """psi_nu at small arguments (series ratio; x may be an array)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        out[i] = psi_arrays([nu], xi)[0]
    return out


def _radial_parts(mode, lam, pair, settings):
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if np.any(lam == 0):
        raise DomainError("lambda must be nonzero")
    m1, m2 = (as_profile(m) for m in pair.media)
    v1, w1 = _shoot(mode, lam, m1, settings)
    v2, w2 = _shoot(mode, lam, m2, settings)
    c1, c2 = m1.boundary_constants[0], m2.boundary_constants[0]
    return c1 * w1 * v2 - c2 * w2 * v1, v1, w1, v2, w2


def char_det_radial(mode: Mode, lam, pair: MediumPair, settings: IntegratorSettings = IntegratorSettings()):
    """Normalized boundary determinant from shooting; scalar or array lam."""
    scalar = np.ndim(lam) == 0
    num, v1, w1, v2, w2 = _radial_parts(mode, lam, pair, settings)
    out = num / (np.abs(v1 * v2) + np.abs(w1 * w2))
    return complex(out[0]) if scalar else out


def char_det_radial_raw(mode: Mode, lam, pair: MediumPair, settings: IntegratorSettings = IntegratorSettings()):
    """Unnormalized shooting determinant; holomorphic in lam (used for zeros)."""
    scalar = np.ndim(lam) == 0
    num = _radial_parts(mode, lam, pair, settings)[0]
    return complex(num[0]) if scalar else num


# ----------------------------------------------------------------------------
# Dirichlet-to-Neumann symbols


def rho_branch(z, lam):
    """rho(z) continued to the half plane of lam (Re rho > 0 for Im lam != 0)."""
    lam = complex(lam)
    if lam.imag < 0:
        return rho(complex(z).conjugate()).conjugate()
    return rho(z)


def _medium_s(medium):
    return medium.s


def dn_symbol(mode: Mode, lam: complex, medium) -> complex:
    """-s psi_nu(s lam) + (d-2)/(2 lam): DN eigenvalue on degree-l harmonics."""
    lam = complex(lam)
    s = _medium_s(medium)
    p = psi_arrays([mode.nu], s * lam)[0]
    return complex(-s * p + (mode.d - 2) / (2.0 * lam))


def rho0(sigma: float, lam: complex, d: int) -> complex:
    nu_s = math.sqrt(sigma + ((d - 2) / 2.0) ** 2)
    return rho_branch(nu_s / complex(lam), lam)


def rho_tilde(sigma: float, lam: complex, medium, d: int) -> complex:
    s = _medium_s(medium)
    nu_s = math.sqrt(sigma + ((d - 2) / 2.0) ** 2)
    return s * rho_branch(nu_s / (s * complex(lam)), lam)


def t_symbol(mode: Mode, lam: complex, pair: MediumPair) -> complex:
    (c1, _), (c2, _) = (m.boundary_constants for m in pair.media)
    return c1 * dn_symbol(mode, lam, pair.media[0]) - c2 * dn_symbol(mode, lam, pair.media[1])


def g_symbol(sigma: float, lam: complex, pair: MediumPair) -> complex:
    """c1 rho~1 - c2 rho~2 evaluated in quotient form."""
    if pair.condition == VIOLATED:
        raise ConditionError("medium pair satisfies neither (c1 = c2, n1 != n2) nor the anisotropic sign condition")
    lam = complex(lam)
    (c1, n1), (c2, n2) = (m.boundary_constants for m in pair.media)
    x = (sigma + ((pair.d - 2) / 2.0) ** 2) / lam**2
    r1 = rho_tilde(sigma, lam, pair.media[0], pair.d)
    r2 = rho_tilde(sigma, lam, pair.media[1], pair.d)
    return ((c1 * c1 - c2 * c2) * x - (c1 * n1 - c2 * n2)) / (c1 * r1 + c2 * r2)


def g_symbol_difference(sigma: float, lam: complex, pair: MediumPair) -> complex:
    (c1, _), (c2, _) = (m.boundary_constants for m in pair.media)
    return c1 * rho_tilde(sigma, lam, pair.media[0], pair.d) - c2 * rho_tilde(sigma, lam, pair.media[1], pair.d)


def mode_orders(d: int, nu_max: float):
    """Physical orders l + d/2 - 1 up to nu_max."""
    lmax = int(math.floor(nu_max - d / 2.0 + 1.0))
    return np.arange(0, max(lmax, 0) + 1) + d / 2.0 - 1.0


def dn_approx_error(lam: complex, medium, d: int, nu_max: float, nus=None) -> float:
    """max over modes of (1 + nu^2/|lam|^2)^{1/2} |N~ + rho~ - (d-2)/(2 lam)|.

    The mode value is ``s |psi_nu(s lam) - rho(nu/(s lam))|``.  ``nus``
    overrides the physical mode grid (used for refinement checks).
    """
    lam = complex(lam)
    if nu_max < 4 * abs(lam.real):
        raise DomainError("nu_max must be at least 4 Re(lambda)")
    s = _medium_s(medium)
    nus = mode_orders(d, nu_max) if nus is None else np.asarray(nus, dtype=float)
    sl = s * lam
    try:
        p = psi_arrays(nus, sl)
    except PoleError as exc:
        raise PoleError(f"DN pole at nu={exc.nu} for lambda={lam}", nu=exc.nu, point=lam) from None
    z = nus / sl
    if sl.imag < 0:
        r = np.conj(-1j * np.sqrt(1.0 - np.conj(z) ** 2))
    else:
        r = -1j * np.sqrt(1.0 - z * z)
    weight = np.sqrt(1.0 + nus**2 / abs(lam) ** 2)
    return float(np.max(weight * s * np.abs(p - r)))


def medium_pair_from_values(c1, n1, c2, n2, d=3) -> MediumPair:
    return MediumPair((Medium(c1, n1), Medium(c2, n2)), d)
