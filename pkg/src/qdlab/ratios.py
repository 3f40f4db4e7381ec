"""Ratio-average main terms for the family, the implied log-derivative
prediction, and the one-level density prediction with lower-order terms.

The density integrand couples zeta'/zeta(1+2it) with a rotated zeta(1-2it);
both have simple poles at t=0 that cancel.  For |t| below a switch radius
the integrand is evaluated from a fused Taylor expansion whose coefficients
are extracted once by Cauchy/FFT sampling; the two branches are required to
agree across the switchover (pinned by the tests at 1e-6 and holding with
large margin).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numth
from .errors import DomainError
from .quadrature import adaptive_gauss
from .special import STIELTJES, log_gamma, zeta, zeta_log_deriv

_SWITCH_T = 1e-3
_SERIES_ORDER = 12


@dataclass(frozen=True)
class RatiosParams:
    """Shift parameters for the ratio average sum_p L(1/2+a)/L(1/2+b)."""

    alpha: complex
    beta: complex
    X: int
    v: int
    im_margin_eps: float = 0.1

    def validate(self) -> None:
        a, b = complex(self.alpha), complex(self.beta)
        if not -0.25 < a.real < 0.25:
            raise DomainError(f"Re alpha = {a.real} outside (-1/4, 1/4)")
        if not 0.5 / math.log(self.X) <= b.real < 0.25:
            raise DomainError(
                f"Re beta = {b.real} outside [1/(2 log X), 1/4) at X={self.X}")
        cap = self.X ** (1.0 - self.im_margin_eps)
        if abs(a.imag) > cap or abs(b.imag) > cap:
            raise DomainError(f"imaginary shift exceeds X^(1-eps) = {cap:.3g}")
        if self.v not in (1, 3):
            raise DomainError(f"residue class must be 1 or 3, got {self.v}")


def _gamma_ratio(u) -> complex:
    """Q(u) = Gamma(1/4 - u/2) / Gamma(1/4 + u/2)."""
    u = np.asarray(u, dtype=complex)
    out = np.exp(log_gamma(0.25 - 0.5 * u) - log_gamma(0.25 + 0.5 * u))
    return complex(out) if np.ndim(u) == 0 else out


def _phase_sum(ps_log: np.ndarray, shift: complex):
    """sum_p (p/pi)^(-shift) over the prime family (ps_log = log(p/pi))."""
    return np.exp(-shift * ps_log).sum()


def ratios_main_terms(params: RatiosParams) -> complex:
    """Main terms of sum_p L(1/2+alpha)/L(1/2+beta): the zeta-ratio piece
    plus the functional-equation swap with the gamma-factor ratio.
    """
    params.validate()
    a, b = complex(params.alpha), complex(params.beta)
    if abs(a - b) < 1e-12:
        raise DomainError("alpha = beta puts zeta(1-alpha+beta) at its pole; "
                          "use log_deriv_prediction for the diagonal limit")
    ps = numth.sieve_primes(params.X, params.v).primes
    ps_log = np.log(ps / math.pi)
    first = len(ps) * zeta(1 + 2 * a) / zeta(1 + a + b)
    swap = _gamma_ratio(a) * zeta(1 - 2 * a) / zeta(1 - a + b) * _phase_sum(ps_log, a)
    return complex(first + swap)


def euler_product_check(alpha: complex, beta: complex, P: int) -> float:
    """|prod_{p<=P} localfactor(p) / (zeta(1+2a)/zeta(1+a+b)) - 1|.

    localfactor(p) = 1 + (p^-(1+2a) - p^-(1+a+b)) / (1 - p^-(1+2a)).
    """
    a, b = complex(alpha), complex(beta)
    if a.real <= 0.01 or (a + b).real <= 0.02:
        raise DomainError("euler product check needs Re alpha > 0.01 and "
                          "Re(alpha+beta) > 0.02")
    log_acc = 0.0 + 0.0j
    for block in numth.iter_prime_blocks(int(P)):
        lp = np.log(block.astype(np.float64))
        t = np.exp(-(1 + 2 * a) * lp)
        u = np.exp(-(1 + a + b) * lp)
        log_acc += np.log(1.0 + (t - u) / (1.0 - t)).sum()
    target = zeta(1 + 2 * a) / zeta(1 + a + b)
    return abs(np.exp(log_acc) / target - 1.0)


def log_deriv_prediction(r: complex, X: int, v: int) -> complex:
    """Predicted sum_p L'/L(1/2+r, chi_p):
    X* zeta'/zeta(1+2r) - Q(r) zeta(1-2r) sum_p (p/pi)^(-r).
    """
    r = complex(r)
    if not 0 < r.real < 0.25 or r.real * math.log(X) < 0.5:
        warnings.warn(f"Re r = {r.real} outside the stated range "
                      f"[1/(2 log X), 1/4); result is exploratory", stacklevel=2)
    ps = numth.sieve_primes(X, v).primes
    ps_log = np.log(ps / math.pi)
    return complex(len(ps) * zeta_log_deriv(1 + 2 * r)
                   - _gamma_ratio(r) * zeta(1 - 2 * r) * _phase_sum(ps_log, r))


# ---------------------------------------------------------------------------
# One-level density prediction (lower-order terms included)
# ---------------------------------------------------------------------------

def _g_poly_coeffs(order: int = 10) -> np.ndarray:
    """Taylor coefficients of g(w) where zeta(1+w) = (1+g(w))/w."""
    c = np.zeros(order + 1, dtype=complex)
    fact = 1.0
    for k, gk in enumerate(STIELTJES):
        if k:
            fact *= k
        if k + 1 <= order:
            c[k + 1] = (-1) ** k * gk / fact
    return c


def _poly_eval(coeffs: np.ndarray, w):
    out = np.zeros_like(np.asarray(w, dtype=complex))
    for c in coeffs[::-1]:
        out = out * w + c
    return out


def _zeta_reg_part(w):
    """g'(w)/(1+g(w)), the regular part of zeta'/zeta(1+w) = -1/w + ..."""
    c = _g_poly_coeffs()
    dc = c[1:] * np.arange(1, len(c))
    return _poly_eval(dc, w) / (1.0 + _poly_eval(c, w))


@lru_cache(maxsize=1)
def _h_series(order: int = _SERIES_ORDER, radius: float = 0.1, samples: int = 128):
    """Taylor coefficients of H(t) = Q(it)(1 + g(-2it)) by Cauchy/FFT.

    H is analytic in |t| < 1/2 (nearest Gamma pole), so radius 0.1 keeps
    coefficient extraction far from both roundoff and truncation trouble.
    """
    theta = 2.0 * math.pi * np.arange(samples) / samples
    t = radius * np.exp(1j * theta)
    c = _g_poly_coeffs()
    H = _gamma_ratio(1j * t) * (1.0 + _poly_eval(c, -2j * t))
    coeffs = np.fft.fft(H) / samples
    coeffs = coeffs[: order + 1] / radius ** np.arange(order + 1)
    return coeffs


@dataclass(frozen=True)
class _FamilyMoments:
    """Precomputed log moments M_m = sum_p log(p/pi)^m for the fused branch."""

    x_star: int
    ps_log: np.ndarray
    moments: np.ndarray

    @classmethod
    def build(cls, X: int, v: int, order: int = _SERIES_ORDER) -> "_FamilyMoments":
        ps = numth.sieve_primes(X, v).primes
        ps_log = np.log(ps / math.pi)
        moments = np.array([np.sum(ps_log ** m) for m in range(order + 1)])
        return cls(x_star=len(ps), ps_log=ps_log, moments=moments)


def _sum12_fused(ts: np.ndarray, fam: _FamilyMoments) -> np.ndarray:
    """sum_p [zeta'/zeta(1+2it) - (p/pi)^(-it) Q(it) zeta(1-2it)] for small |t|,
    via the Taylor expansion of N_p(t) = (p/pi)^(-it) H(t) - 1 around t=0.
    """
    h = _h_series()
    order = len(h) - 1
    # C_k = sum_p [t^k] N_p = sum_j h_j (-i)^(k-j) M_(k-j) / (k-j)!  (k >= 1)
    C = np.zeros(order + 1, dtype=complex)
    for k in range(order + 1):
        js = np.arange(k + 1)
        C[k] = np.sum(h[js] * (-1j) ** (k - js)
                      * fam.moments[k - js] / _factorials[k - js])
    C[0] -= fam.x_star
    if abs(C[0]) > 1e-9 * max(fam.x_star, 1):
        raise DomainError("pole cancellation failed in the fused expansion")
    ts = np.asarray(ts, dtype=float)
    acc = np.zeros(ts.shape, dtype=complex)
    for k in range(order, 0, -1):
        acc = acc * ts + C[k]
    return acc / 2j + fam.x_star * _zeta_reg_part(2j * ts)


_factorials = np.array([math.factorial(k) for k in range(_SERIES_ORDER + 1)], dtype=float)


def _sum12_direct(ts: np.ndarray, fam: _FamilyMoments) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape, dtype=complex)
    for i, t in enumerate(ts):
        zl = zeta_log_deriv(1.0 + 2j * t)
        zv = zeta(1.0 - 2j * t)
        out[i] = fam.x_star * zl - _gamma_ratio(1j * t) * zv * _phase_sum(fam.ps_log, 1j * t)
    return out


def density_integrand(ts, X: int, v: int, fam: _FamilyMoments | None = None,
                      branch: str = "auto") -> np.ndarray:
    """sum_p [log(p/pi) + psi-sym(t) + 2(zeta'/zeta - swap)], the bracket of
    the lower-order-terms density formula; regular (and zero) at t=0.
    """
    if fam is None:
        fam = _FamilyMoments.build(X, v)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    w = 0.25 + 0.5j * ts
    psi_sym = np.real(_digamma_vec(w))  # (psi(w) + psi(conj w))/2 = Re psi(w)
    if branch == "auto":
        small = np.abs(ts) < _SWITCH_T
        s12 = np.empty(ts.shape, dtype=complex)
        if small.any():
            s12[small] = _sum12_fused(ts[small], fam)
        if (~small).any():
            s12[~small] = _sum12_direct(ts[~small], fam)
    elif branch == "fused":
        s12 = _sum12_fused(ts, fam)
    elif branch == "direct":
        s12 = _sum12_direct(ts, fam)
    else:
        raise DomainError(f"unknown branch {branch!r}")
    return fam.moments[1] + fam.x_star * psi_sym + 2.0 * s12


def _digamma_vec(w):
    from .special import digamma

    return digamma(w)


def density_prediction(f, X: int, v: int, t_cut: float = 60.0) -> float:
    """(1/2pi) int f(t) * density_integrand(t) dt for an even real f with
    at least 1/(1+t^2) decay; f is truncated at |t| = t_cut.
    """
    fam = _FamilyMoments.build(X, v)

    def integrand(ts):
        return np.real(f(ts) * density_integrand(ts, X, v, fam))

    val = adaptive_gauss(integrand, 0.0, t_cut, abs_tol=1e-8 * max(fam.x_star, 1),
                         split_points=(_SWITCH_T, 1.0))
    # evenness + conjugate symmetry fold the full line onto [0, inf)
    return float(np.real(val)) / math.pi


def kernel_weighted_density_prediction(tf, X: int, v: int, kernel,
                                       T_kernel: float = 8.0) -> float:
    """Lower-order-terms prediction for the kernel-weighted one-level
    density (1/2 K(1/2) Li X)^-1 sum_p sum_rho K(rho) r(gamma log X/2pi),
    i.e. the density formula applied to f(t) = K(1/2+it) r(t log X/2pi).
    """
    lnX = math.log(X)

    def f(ts):
        ts = np.asarray(ts, dtype=float)
        kv = np.real(np.asarray(kernel.K(0.5 + 1j * ts)))
        return kv * tf.r(ts * (lnX / (2.0 * math.pi)))

    raw = density_prediction(f, X, v, t_cut=T_kernel)
    return raw / (0.5 * kernel.at_half * numth.li(X))


@dataclass(frozen=True)
class ScaledDensityPrediction:
    value: float
    limit_value: float


def scaling_limit_integrand(tau, form: str = "exp"):
    """The Corollary-style scaling-limit kernel, in its two equal forms:
    1 + e^(-2 pi i tau)/(4 pi i tau) - e^(2 pi i tau)/(4 pi i tau)  (form="exp")
    and 1 - sin(2 pi tau)/(2 pi tau)  (form="sinc"); value 0 at tau=0.
    """
    tau = np.asarray(tau, dtype=float)
    if form == "sinc":
        out = 1.0 - np.sinc(2.0 * tau)
        return float(out) if np.ndim(tau) == 0 else out
    if form != "exp":
        raise DomainError(f"unknown form {form!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        z = 2j * math.pi * tau
        out = np.where(tau == 0.0, 0.0,
                       np.real(1.0 + np.exp(-z) / (2.0 * z) - np.exp(z) / (2.0 * z)))
    return float(out) if np.ndim(tau) == 0 else out


def scaled_density_prediction(g, X: int, v: int,
                              limit_window: float = 40.0) -> ScaledDensityPrediction:
    """(X*)^-1 density prediction for f(t) = g(t log X / 2pi), alongside the
    scaling-limit value int g(tau)(1 - sinc(2 pi tau)) d tau.
    """
    lnX = math.log(X)
    scale = lnX / (2.0 * math.pi)

    def f(ts):
        return g(np.asarray(ts, dtype=float) * scale)

    fam = _FamilyMoments.build(X, v)
    raw = density_prediction(f, X, v, t_cut=min(60.0, limit_window / scale))
    limit = 2.0 * float(np.real(adaptive_gauss(
        lambda taus: g(taus) * scaling_limit_integrand(taus), 0.0, limit_window,
        abs_tol=1e-10)))
    return ScaledDensityPrediction(value=raw / fam.x_star, limit_value=limit)
