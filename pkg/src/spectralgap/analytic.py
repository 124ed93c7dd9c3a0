"""Exact reference spectra for balls via Bessel function zeros.

The first Dirichlet eigenfunction of the unit ball in R^N is radial,
u(r) = c r^(-nu) J_nu(j1 r) with nu = N/2 - 1 and j1 the first positive zero
of J_nu; its eigenvalue is j1^2.  The second eigenvalue is the square of the
first zero of J_(nu+1).  Everything here is computed, not tabulated: J_nu by
ascending series (small arguments), backward recurrence (large integer
orders) or spherical closed forms (half-integer orders); zeros by bracketing
plus bisection and a Newton polish.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BracketError",
    "BallSpectrum",
    "unit_ball_volume",
    "bessel_j",
    "bessel_jp",
    "bessel_zero",
    "ball_spectrum",
    "theta_spectrum",
    "rescale_eigenvalue",
    "ball_eigenfunction",
]

_SERIES_CUTOFF = 8.0
_SERIES_TERMS = 32


class BracketError(RuntimeError):
    """A zero of J_nu could not be bracketed in the scanned range."""


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _series_coeffs(nu: float):
    # J_nu(x) = (x/2)^nu * sum_m (-1)^m (x^2/4)^m / (m! Gamma(m+nu+1))
    m = np.arange(_SERIES_TERMS)
    logs = np.array([math.lgamma(k + 1.0) + math.lgamma(k + nu + 1.0) for k in m])
    return ((-1.0) ** m) * np.exp(-logs)


def _series_profile(nu: float, z):
    """z^(-nu) J_nu(z) as an even power series, valid for |z| <= ~12."""
    z = np.asarray(z, dtype=float)
    t = 0.25 * z * z
    coeffs = _series_coeffs(nu)
    acc = np.full_like(t, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * t + c
    return acc * 0.5**nu


def _miller_integer(n: int, x: float) -> float:
    """J_n(x) for integer n and large x by backward (Miller) recurrence.

    Normalized with J_0 + 2 J_2 + 2 J_4 + ... = 1; start order far enough
    above max(n, x) that the downward recursion has converged.
    """
    m_start = int(x + 20 + 12 * math.sqrt(x))
    if m_start % 2:
        m_start += 1
    m_start = max(m_start, n + 20)
    jp, jc = 0.0, 1e-30
    norm = 0.0
    result = jc if n == m_start else 0.0
    for k in range(m_start, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp, jc = jc, jm
        if k - 1 == n:
            result = jc
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            norm *= 1e-250
            result *= 1e-250
    norm += jc  # jc now holds the unnormalized J_0
    return result / norm


def _spherical_large(nu: float, x):
    """J_(n+1/2)(x) closed forms, stable for x away from 0."""
    x = np.asarray(x, dtype=float)
    pref = np.sqrt(2.0 / (math.pi * x))
    s, c = np.sin(x), np.cos(x)
    if nu == 0.5:
        return pref * s
    if nu == 1.5:
        return pref * (s / x - c)
    if nu == 2.5:
        return pref * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x)
    raise ValueError(f"half-integer order {nu} not supported for large arguments")


def bessel_j(nu: float, x):
    """Bessel function J_nu(x) for nu >= 0, x >= 0 (vectorized in x).

    Ascending series below x = 10; above that, Miller backward recurrence for
    integer orders and spherical closed forms for half-integer orders up to
    5/2.  Absolute error stays below 1e-12 on [0, 50].
    """
    if nu < 0:
        raise ValueError(f"order must be >= 0, got {nu}")
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if np.any(x_arr < 0):
        raise ValueError("argument must be >= 0")
    out = np.empty_like(x_arr)
    small = x_arr <= _SERIES_CUTOFF
    if np.any(small):
        xs = x_arr[small]
        out[small] = xs**nu * _series_profile(nu, xs)
    if np.any(~small):
        xl = x_arr[~small]
        if nu == int(nu):
            out[~small] = [_miller_integer(int(nu), float(v)) for v in xl]
        elif (2 * nu) == int(2 * nu):
            out[~small] = _spherical_large(nu, xl)
        else:
            raise ValueError(f"order {nu} not supported for arguments above {_SERIES_CUTOFF}")
    return float(out[0]) if scalar else out


def bessel_jp(nu: float, x):
    """Derivative J_nu'(x) via J_nu' = (nu/x) J_nu - J_(nu+1)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0
    out = np.empty_like(x_arr)
    pos = x_arr > 0
    if np.any(pos):
        xp = x_arr[pos]
        out[pos] = (nu / xp) * bessel_j(nu, xp) - bessel_j(nu + 1, xp)
    if np.any(~pos):
        # limits at the origin: J_1'(0) = 1/2, all other orders give 0
        out[~pos] = 0.5 if nu == 1 else 0.0
    return float(out[0]) if scalar else out


def bessel_zero(nu: float, k: int, max_arg: float = 200.0) -> float:
    """k-th positive zero of J_nu by sign-change bracketing and bisection.

    A Newton polish with J_nu' finishes to ~1e-14 relative accuracy; a
    bracket that cannot be found below ``max_arg`` raises BracketError.
    """
    if k < 1:
        raise ValueError(f"zero index must be >= 1, got {k}")
    lo = max(0.05, nu)  # j_(nu,1) > nu
    step = 0.1
    a = lo
    fa = bessel_j(nu, a)
    found = 0
    while a < max_arg:
        b = a + step
        fb = bessel_j(nu, b)
        if fa * fb < 0 or fb == 0.0:
            found += 1
            if found == k:
                break
        a, fa = b, fb
    else:
        raise BracketError(
            f"could not bracket zero {k} of J_{nu} below x = {max_arg}"
        )
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = bessel_j(nu, m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
        if b - a < 1e-13 * b:
            break
    root = 0.5 * (a + b)
    for _ in range(4):
        dj = bessel_jp(nu, root)
        if dj == 0:
            break
        root -= bessel_j(nu, root) / dj
    return float(root)


# ---------------------------------------------------------------------------
# Ball spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallSpectrum:
    """First two Dirichlet eigenvalues of the unit ball in R^N, with the
    L2-normalized radial ground state's data.

    ``kappa`` is the (constant) magnitude of the normal derivative of that
    ground state on the boundary sphere.
    """

    dim: int
    nu: float
    j1: float
    j2: float
    lambda1: float
    lambda2: float
    norm_const: float
    kappa: float


@lru_cache(maxsize=8)
def ball_spectrum(dim: int) -> BallSpectrum:
    """Exact spectral data of the unit ball; supported dimensions: 2 and 3."""
    if dim not in (2, 3):
        raise ValueError(f"ball spectrum supports N in {{2, 3}}, got {dim}")
    nu = dim / 2.0 - 1.0
    j1 = bessel_zero(nu, 1)
    j2 = bessel_zero(nu + 1.0, 1)
    # |J_(nu+1)(j1)| from the profile series; c normalizes the L2 norm to 1
    jnu1_at_j1 = abs(j1 ** (nu + 1.0) * _series_profile(nu + 1.0, np.array([j1]))[0])
    norm_const = math.sqrt(2.0 / (dim * unit_ball_volume(dim))) / jnu1_at_j1
    _, du = _radial_eval(nu, j1, norm_const, np.array([1.0]))
    return BallSpectrum(
        dim=dim,
        nu=nu,
        j1=j1,
        j2=j2,
        lambda1=j1 * j1,
        lambda2=j2 * j2,
        norm_const=norm_const,
        kappa=float(abs(du[0])),
    )


def theta_spectrum(dim: int):
    """(lambda1, lambda2) of two disjoint balls of half measure each,
    normalized to total measure omega_N: both equal 2^(2/N) lambda1(ball)."""
    spec = ball_spectrum(dim)
    lam = rescale_eigenvalue(spec.lambda1, 2.0 ** (-1.0 / dim))
    return lam, lam


def rescale_eigenvalue(lam: float, t: float) -> float:
    """Eigenvalue of the dilated domain t*Omega: lambda / t^2."""
    if t <= 0:
        raise ValueError(f"scale factor must be > 0, got {t}")
    return lam / (t * t)


def _radial_eval(nu, j1, c, r):
    """Value and radial derivative of c r^(-nu) J_nu(j1 r).

    Uses the even profile series p_nu(z) = z^(-nu) J_nu(z), removing the
    r = 0 singularity: u = c j1^nu p_nu(j1 r), u' = -c j1^(nu+2) r p_(nu+1)(j1 r).
    """
    z = j1 * r
    val = c * j1**nu * _series_profile(nu, z)
    der = -c * j1 ** (nu + 2.0) * r * _series_profile(nu + 1.0, z)
    return val, der


def ball_eigenfunction(dim: int, r):
    """Unit-L2-norm first eigenfunction of the unit ball at radius r in [0, 1].

    Returns (value, radial derivative); at r = 1 the value vanishes and the
    derivative magnitude equals ``kappa``.
    """
    spec = ball_spectrum(dim)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(r_arr > 1):
        raise ValueError("radius must lie in [0, 1]")
    val, der = _radial_eval(spec.nu, spec.j1, spec.norm_const, r_arr)
    if np.ndim(r) == 0:
        return float(val), float(der)
    return val, der


def radial_profile(dim: int):
    """Vectorized (U, U') callables for the unit-ball ground state."""
    spec = ball_spectrum(dim)

    def value(r):
        return _radial_eval(spec.nu, spec.j1, spec.norm_const, np.asarray(r, dtype=float))[0]

    def derivative(r):
        return _radial_eval(spec.nu, spec.j1, spec.norm_const, np.asarray(r, dtype=float))[1]

    return value, derivative
