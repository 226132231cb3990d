"""Gaussian log-CDF kernel and its derivatives.

Everything in this package is built on the function

    k(x) = -log (log Phi(x))' = x**2/2 + log( integral_{-inf}^{x} e^{-s^2/2} ds ),

where Phi is the standard normal CDF.  Its derivatives obey the exact
identities

    k'(x)  = x + e^{-k(x)},          e^{-k(x)} = phi(x)/Phi(x)  (inverse Mills ratio),
    k''(x) = 1 - k'(x) e^{-k(x)},

and both k' and k'' are strictly positive, with k'(-inf) = 0 and k'(x) ~ x
as x -> +inf.  Since k' is a strictly increasing bijection of R onto
(0, inf) it has a well-defined inverse, computed here by safeguarded
bisection plus Newton polish.

Numerical strategy
------------------
* ``inv_mills``: for x >= -8 the direct ratio phi(x)/Phi(x); for x < -8 the
  scaled-complementary-error-function form sqrt(2/pi)/erfcx(-x/sqrt(2)),
  which never underflows.  The two branches agree to ~1e-14 at the switch.
* ``k_value``: for x < -8 the exactly-cancelled form
  log( sqrt(pi/2) * erfcx(-x/sqrt(2)) ); direct formula elsewhere.
* ``k_prime``: for x < -8 the Lentz-evaluated continued fraction

      k'(x) = 1/(t + 2/(t + 3/(t + 4/(t + ...)))),   t = -x,

  which is the tail of the classical Mills-ratio continued fraction and is
  relatively accurate down to k' ~ 1e-300.  The naive sum x + inv_mills(x)
  loses absolute accuracy ~ulp(|x|) to cancellation for deep negative x;
  the continued fraction does not.  ``kernel_eval`` bundles, by contract,
  the literal compositions k' = x + inv_mills and k'' = 1 - k'*inv_mills.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "KernelEval",
    "QuadratureConfig",
    "inv_mills",
    "k_value",
    "k_prime",
    "k_second",
    "kernel_eval",
    "inv_k_prime",
    "K_PRIME_AT_ZERO",
    "exp_half_square_integral",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SQRT_PI_OVER_2 = math.sqrt(math.pi / 2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# erfcx branch switch: both branches agree to better than 1e-13 here
_DEEP = -8.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and node counts for the Gaussian-weight quadratures.

    Defaults: abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=200,
    hermite_nodes=64.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    hermite_nodes: int = 64

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("QuadratureConfig tolerances must be positive")
        if self.hermite_nodes < 8:
            raise DomainError("QuadratureConfig.hermite_nodes must be >= 8")
        if self.max_subdivisions < 1:
            raise DomainError("QuadratureConfig.max_subdivisions must be >= 1")


@dataclass(frozen=True)
class KernelEval:
    """Bundle of k(x), k'(x), k''(x) and the inverse Mills ratio at x.

    By construction the fields satisfy, bit for bit,
    ``k_prime == x + inv_mills`` and ``k_double_prime == 1 - k_prime*inv_mills``.
    """

    x: float
    k: float
    k_prime: float
    k_double_prime: float
    inv_mills: float


def _check_finite(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name}: argument must be finite")


def _wrap(x_in, out: np.ndarray):
    """Return a python float for scalar input, ndarray otherwise."""
    if np.ndim(x_in) == 0:
        return float(out)
    return out


def inv_mills(x):
    """Inverse Mills ratio phi(x)/Phi(x) = e^{-k(x)}.

    Relative accuracy ~1e-14 over the whole double range; underflows to 0
    together with phi(x) beyond x ~ 38.6.
    """
    xa = np.asarray(x, dtype=float)
    _check_finite(xa, "inv_mills")
    out = np.empty_like(xa)
    deep = xa < _DEEP
    if deep.any():
        out[deep] = _SQRT_2_OVER_PI / special.erfcx(-xa[deep] / _SQRT2)
    rest = ~deep
    if rest.any():
        xr = xa[rest]
        with np.errstate(over="ignore"):
            out[rest] = np.exp(-0.5 * xr * xr) / (_SQRT_2PI * special.ndtr(xr))
    return _wrap(x, out)


def k_value(x):
    """k(x) = x^2/2 + log( sqrt(2 pi) Phi(x) )."""
    xa = np.asarray(x, dtype=float)
    _check_finite(xa, "k_value")
    out = np.empty_like(xa)
    deep = xa < _DEEP
    if deep.any():
        # x^2/2 cancels exactly against log Phi's leading term
        out[deep] = np.log(_SQRT_PI_OVER_2 * special.erfcx(-xa[deep] / _SQRT2))
    rest = ~deep
    if rest.any():
        xr = xa[rest]
        out[rest] = 0.5 * xr * xr + np.log(_SQRT_2PI * special.ndtr(xr))
    return _wrap(x, out)


def _cf_mills_tail(t: np.ndarray, iters: int = 26) -> np.ndarray:
    """Continued fraction 2/(t + 3/(t + 4/(t + ...))) by modified Lentz.

    Converges to ~1e-16 relative within 20 levels for t >= 8; extra
    iterations are no-ops once converged.
    """
    tiny = 1e-300
    f = np.full_like(t, tiny)
    c = f.copy()
    d = np.zeros_like(t)
    for n in range(2, 2 + iters):
        d = t + n * d
        np.copyto(d, tiny, where=(d == 0))
        c = t + n / c
        np.copyto(c, tiny, where=(c == 0))
        d = 1.0 / d
        f = f * (c * d)
    return f


def mills_remainder(t):
    """k'(-t) for t > 0: the remainder 1/m(t) - t of the upper Mills ratio m."""
    ta = np.asarray(t, dtype=float)
    return _wrap(t, 1.0 / (ta + _cf_mills_tail(ta)))


def k_prime(x):
    """k'(x) = x + e^{-k(x)} > 0, continued-fraction path for x < -8."""
    xa = np.asarray(x, dtype=float)
    _check_finite(xa, "k_prime")
    out = np.empty_like(xa)
    deep = xa < _DEEP
    if deep.any():
        t = -xa[deep]
        out[deep] = 1.0 / (t + _cf_mills_tail(t))
    rest = ~deep
    if rest.any():
        xr = xa[rest]
        out[rest] = xr + np.asarray(inv_mills(xr))
    return _wrap(x, out)


def k_second(x):
    """k''(x) = 1 - k'(x) e^{-k(x)} > 0, via e^{-k} = k' - x."""
    xa = np.asarray(x, dtype=float)
    kp = np.asarray(k_prime(xa))
    return _wrap(x, 1.0 - kp * (kp - xa))


K_PRIME_AT_ZERO = _SQRT_2_OVER_PI  # k'(0) = e^{-k(0)} = sqrt(2/pi)


def kernel_eval(x) -> KernelEval:
    """Evaluate the kernel bundle at a single finite point."""
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError("kernel_eval: argument must be finite")
    im = inv_mills(xf)
    kp = xf + im
    kpp = 1.0 - kp * im
    return KernelEval(x=xf, k=k_value(xf), k_prime=kp, k_double_prime=kpp, inv_mills=im)


def _inv_k_prime_seed(u: np.ndarray):
    """Bracketing intervals for k'(t) = u from the two-sided asymptotics."""
    lo = np.empty_like(u)
    hi = np.empty_like(u)
    small = u < K_PRIME_AT_ZERO
    # k'(t) = -1/t + 2/t^3 + ...  =>  t ~ -1/u + 2u for small u
    lo[small] = -1.0 / u[small] + 2.0 * u[small] - 3.0
    hi[small] = 0.0
    # k'(t) - t = e^{-k(t)} <= sqrt(2/pi) for t >= 0  =>  u - 0.8 <= t <= u
    lo[~small] = np.maximum(0.0, u[~small] - 1.0)
    hi[~small] = u[~small]
    return lo, hi


def inv_k_prime(u):
    """Inverse of k': the unique t with k'(t) = u, for u > 0.

    Safeguarded: verified bracket, 48 bisection steps, two Newton polishes.
    |k'(result) - u| <= 1e-12 * max(1, u).
    """
    ua = np.asarray(u, dtype=float)
    _check_finite(ua, "inv_k_prime")
    if np.any(ua <= 0.0):
        raise DomainError("inv_k_prime: k' maps onto (0, inf); argument must be > 0")
    scalar = np.ndim(u) == 0
    ua = np.atleast_1d(ua)
    lo, hi = _inv_k_prime_seed(ua)
    for _ in range(64):
        bad = np.asarray(k_prime(lo)) > ua
        if not bad.any():
            break
        lo[bad] = 2.0 * lo[bad] - 1.0
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        below = np.asarray(k_prime(mid)) < ua
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(2):
        t = t - (np.asarray(k_prime(t)) - ua) / np.asarray(k_second(t))
    if scalar:
        return float(t[0])
    return t


def exp_half_square_integral(x):
    """integral_0^x e^{u^2/2} du computed as sqrt(2) e^{x^2/2} dawsn(x/sqrt(2)).

    Returned in scaled form (value * e^{-x^2/2}) so it never overflows; the
    caller compares against similarly scaled bounds.
    """
    xa = np.asarray(x, dtype=float)
    _check_finite(xa, "exp_half_square_integral")
    return _wrap(x, _SQRT2 * special.dawsn(xa / _SQRT2))
