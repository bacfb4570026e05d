"""Independent references shared by the tests (mpmath, closed forms)."""

import cmath
import math

import mpmath as mp
import numpy as np

from ite_ball.scaled import arr_value


def mp_besselj(nu, z, dps=50):
    with mp.workdps(dps):
        return mp.besselj(nu, mp.mpc(z.real, z.imag))


def bessel_envelope(nu, z, ref):
    """|J| scale used for relative errors: |J| itself, or the oscillation
    envelope e^{|Im z|} sqrt(2/(pi|z|)) where J oscillates (Re z > nu)."""
    env = abs(ref)
    if z.real > nu:
        env = max(env, mp.e ** abs(z.imag) * mp.sqrt(2 / (mp.pi * max(abs(z), 1))) / 2)
    return env


def scaled_rel_error(m, e, nu, z, dps=50):
    """Envelope-relative error of m * exp(e) against mpmath."""
    with mp.workdps(dps):
        ref = mp_besselj(nu, z, dps)
        val = mp.mpc(complex(m)) * mp.e ** mp.mpf(float(e))
        return float(abs(val - ref) / bessel_envelope(nu, z, ref))


def mp_psi(nu, z, dps=40):
    with mp.workdps(dps):
        zz = mp.mpc(z.real, z.imag)
        return complex(mp.besselj(nu, zz, derivative=1) / mp.besselj(nu, zz))


def mp_airy(z, dps=40):
    with mp.workdps(dps):
        zz = mp.mpc(z.real, z.imag)
        return complex(mp.airyai(zz)), complex(mp.airyai(zz, derivative=1))


def mp_det(nu, lam, s1, s2, c1=1.0, c2=1.0, d=3, dps=30):
    """c1 s1 J'(s1 l) J(s2 l) - c2 s2 J(s1 l) J'(s2 l) + (c2-c1)(d-2)/(2l) J J (times l)."""
    with mp.workdps(dps):
        l = mp.mpc(lam.real, lam.imag)
        j1, j2 = mp.besselj(nu, s1 * l), mp.besselj(nu, s2 * l)
        p1, p2 = mp.besselj(nu, s1 * l, derivative=1), mp.besselj(nu, s2 * l, derivative=1)
        k = (c2 - c1) * (d - 2) / 2.0
        return complex(l * (c1 * s1 * p1 * j2 - c2 * s2 * j1 * p2) + k * j1 * j2)


def gamma32_oracle_zeros(re_range, im_min=1e-6):
    """Complex zeros from w^8 + w^6 - 4 w^4 + w^2 + 1 = 0 with lam = 2u, w = e^{iu}.

    Roots from the companion matrix; each w gives u = -i log w + 2 pi k.
    """
    coeffs = [1, 0, 1, 0, -4, 0, 1, 0, 1]
    comp = np.diag(np.ones(7, complex), -1)
    comp[0, :] = -np.array(coeffs[1:], complex)
    ws = np.linalg.eigvals(comp)
    out = []
    for w in ws:
        u0 = -1j * cmath.log(w)
        for k in range(-2, int(re_range[1] / (4 * math.pi)) + 3):
            lam = 2 * (u0 + 2 * math.pi * k)
            if re_range[0] <= lam.real <= re_range[1] and abs(lam.imag) > im_min:
                out.append(lam)
    # conjugate pairs from reciprocal roots coincide; deduplicate
    uniq = []
    for z in sorted(out, key=lambda z: (z.real, z.imag)):
        if not uniq or min(abs(z - u) for u in uniq) > 1e-9:
            uniq.append(z)
    return uniq


def value(m, e):
    return arr_value(np.asarray(m), np.asarray(e))
