"""Evaluation of L(s, chi_p) and its completion Lambda(s, chi_p).

chi_p is the Legendre symbol (.|p) for an odd prime p, a real primitive
character of conductor p and parity a = 0 (p = 1 mod 4) or 1 (p = 3 mod 4).
The completion

    Lambda(s) = (p/pi)^((s+a)/2) Gamma((s+a)/2) L(s, chi_p) = Lambda(1-s)

is computed by the smoothed (incomplete-gamma) approximate functional
equation with root number +1,

    Lambda(s) = sum_n chi(n) n^-s     (p/pi)^((s+a)/2)   Gamma((s+a)/2,   pi n^2/p)
              + sum_n chi(n) n^-(1-s) (p/pi)^((1-s+a)/2) Gamma((1-s+a)/2, pi n^2/p),

an exact identity; the sums are truncated when the smoothing weight drops
below the double-precision floor relative to the gamma-factor scale.  The
root number is not assumed silently: the functional-equation residual is
recorded on every value and the Dirichlet-series tests pin it down.

A second, much faster evaluation path used for zero hunting integrates the
theta series  theta_a(u) = sum chi(n) n^a exp(-pi n^2 u / p)  over shared
quadrature nodes, so a whole grid of critical-line values costs one theta
tabulation plus a small matrix product.  Both paths are cross-checked in
the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numth
from .errors import DomainError, TruncationBudgetError
from .quadrature import _gl_nodes
from .special import log_gamma, upper_gamma_vec

T_MAX = 100.0
TERM_BUDGET = 10_000_000
EVALUATOR_VERSION = 1


@dataclass(frozen=True)
class QuadChar:
    """Quadratic character chi_p(n) = (n|p) for an odd prime p."""

    p: int
    v: int
    a: int

    @classmethod
    def make(cls, p: int) -> "QuadChar":
        p = int(p)
        if p < 3 or p % 2 == 0 or not numth.is_prime(p):
            raise DomainError(f"modulus must be an odd prime, got {p}")
        v = p % 4
        return cls(p=p, v=v, a=0 if v == 1 else 1)

    def chi(self, n: int) -> int:
        return numth.legendre(n, self.p)

    def chi_values(self, N: int) -> np.ndarray:
        """chi(1), ..., chi(N) as an int8 array."""
        tab = numth.legendre_table(self.p)
        return tab[np.arange(1, N + 1, dtype=np.int64) % self.p]


@dataclass(frozen=True)
class CompletedValue:
    s: complex
    lam: complex
    l: complex
    fe_residual: float


def tol_zero(p: int) -> float:
    """Below this, a central value is 'undetermined', never 'zero'."""
    return 1e-8 * (p / math.pi) ** 0.25


def _log_pf(p: int) -> float:
    return math.log(p / math.pi)


def gamma_factor(chi: QuadChar, s) -> complex:
    """G(s) = (p/pi)^((s+a)/2) Gamma((s+a)/2), so Lambda = G * L."""
    w = (np.asarray(s, dtype=complex) + chi.a) / 2.0
    out = np.exp(w * _log_pf(chi.p) + log_gamma(w))
    return complex(out) if np.ndim(s) == 0 else out


# ---------------------------------------------------------------------------
# Reference path: smoothed AFE with incomplete gamma weights
# ---------------------------------------------------------------------------

def _afe_n_max(p: int, im_max: float, budget: int = TERM_BUDGET) -> int:
    # keep terms until |Gamma(w, pi n^2/p)| < 1e-17 * |Gamma(w)| uniformly
    x_cut = 45.0 + math.pi * im_max / 4.0 + 2.0 * math.log1p(p)
    n = int(math.sqrt(x_cut * p / math.pi)) + 2
    if n > budget:
        raise TruncationBudgetError(
            f"AFE needs {n} terms for p={p}, |Im s|={im_max}; budget {budget}")
    return n


def _afe_lambda_points(chi: QuadChar, ss: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Lambda(s) at arbitrary strip points via the incomplete-gamma AFE."""
    ss = np.asarray(ss, dtype=np.complex128).ravel()
    p, a = chi.p, chi.a
    n_max = _afe_n_max(p, float(np.abs(ss.imag).max(initial=0.0)))
    cv = chi.chi_values(n_max).astype(np.float64)
    keep = cv != 0
    n = np.arange(1, n_max + 1, dtype=np.float64)[keep]
    cv = cv[keep]
    ln_n = np.log(n)
    x = math.pi * n * n / p
    lpf = _log_pf(p)

    out = np.empty(ss.shape, dtype=np.complex128)
    for lo in range(0, ss.size, chunk):
        sl = ss[lo:lo + chunk]
        acc = np.zeros(sl.shape, dtype=np.complex128)
        for sgn in (0, 1):
            # sgn=0: the s-sum; sgn=1: the (1-s)-sum
            se = sl if sgn == 0 else 1.0 - sl
            w = (se + a)[:, None] / 2.0
            g = upper_gamma_vec(w, x[None, :])
            coeff = cv[None, :] * np.exp(-se[:, None] * ln_n[None, :])
            acc += np.exp(w[:, 0] * lpf) * (coeff * g).sum(axis=1)
        out[lo:lo + chunk] = acc
    return out


def eval_completed(chi: QuadChar, s) -> CompletedValue:
    """Lambda(s), L(s) and the functional-equation self-check residual."""
    s = complex(s)
    if not (-1.0 <= s.real <= 2.0):
        raise DomainError(f"Re s = {s.real} outside [-1, 2]")
    if abs(s.imag) > T_MAX:
        raise DomainError(f"|Im s| = {abs(s.imag)} exceeds T_MAX = {T_MAX}")
    lam, lam_rev = _afe_lambda_points(chi, np.array([s, 1.0 - s]))
    residual = abs(lam - lam_rev) / max(abs(lam), 1e-300)
    lval = lam / gamma_factor(chi, s)
    return CompletedValue(s=s, lam=complex(lam), l=complex(lval), fe_residual=float(residual))


def central_value(chi: QuadChar) -> float:
    """L(1/2, chi_p), real by conjugate symmetry."""
    return float(eval_completed(chi, 0.5).l.real)


def dirichlet_series(chi: QuadChar, s, N: int) -> complex:
    """Partial sum of sum chi(n) n^-s (test oracle; Re s > 1 territory)."""
    s = complex(s)
    cv = chi.chi_values(N).astype(np.float64)
    n = np.arange(1, N + 1, dtype=np.float64)
    return complex((cv * np.exp(-s * np.log(n))).sum())


# ---------------------------------------------------------------------------
# Fast path: shared-node quadrature of the theta integral
# ---------------------------------------------------------------------------

class ThetaEvaluator:
    """Evaluate Lambda via Lambda(s) = int_0^inf theta_a(e^v) *
    (e^(v(s+a)/2) + e^(v(1-s+a)/2)) dv with nodes shared by all points.

    Accurate while the completed values are not too far below the theta
    scale; keep |Im s| <= 12 (the test suite pins agreement with the
    AFE path at 1e-11 relative to the gamma-factor scale).
    """

    def __init__(self, chi: QuadChar, t_max: float, x_cut: float | None = None,
                 budget: float = 4.0, order: int = 20):
        self.chi = chi
        self.t_max = float(t_max)
        p, a = chi.p, chi.a
        if x_cut is None:
            x_cut = 70.0 + math.pi * t_max / 4.0
        v_max = math.log(x_cut * p / math.pi)
        osc = t_max / 2.0 + 1.5

        edges = [0.0]
        v0 = 0.0
        while v0 < v_max:
            rate = 2.0 * math.pi * math.exp(v0) / p + osc + 2.0
            dv = min(0.45, budget / rate)
            v0 = min(v0 + dv, v_max)
            edges.append(v0)
        edges = np.asarray(edges)
        xg, wg = _gl_nodes(order)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        v = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        wt = (half[:, None] * wg[None, :]).ravel()

        n_top = int(math.sqrt((x_cut + 4.0) * p / math.pi)) + 1
        if n_top > TERM_BUDGET:
            raise TruncationBudgetError(f"theta tabulation needs {n_top} terms for p={p}")
        cv = chi.chi_values(n_top).astype(np.float64)
        n = np.arange(1, n_top + 1, dtype=np.float64)
        cvn = cv * n ** a
        n2 = n * n

        theta = np.empty(v.size, dtype=np.float64)
        per_panel = order
        for k in range(mid.size):
            sl = slice(k * per_panel, (k + 1) * per_panel)
            coef = (math.pi / p) * np.exp(v[sl])
            m = int(math.sqrt((x_cut + 4.0) / coef[0])) + 1
            m = min(m, n_top)
            theta[sl] = np.exp(-np.outer(coef, n2[:m])) @ cvn[:m]

        self.v = v
        self.wt = wt
        self.theta = theta
        self._lpf = _log_pf(p)

    def lambda_critical(self, ts) -> np.ndarray:
        """Lambda(1/2 + it) (real) for an array of real t."""
        ts = np.asarray(ts, dtype=np.float64)
        a = self.chi.a
        base = self.wt * self.theta * np.exp((0.25 + 0.5 * a) * self.v)
        return 2.0 * (np.cos(0.5 * np.outer(ts, self.v)) @ base)

    def z(self, ts) -> np.ndarray:
        """Hardy Z: Lambda rotated real with |Z| = |L| on the critical line."""
        ts = np.asarray(ts, dtype=np.float64)
        w = (0.5 + 1j * ts + self.chi.a) / 2.0
        scale = np.exp(w.real * self._lpf + np.real(log_gamma(w)))
        return self.lambda_critical(ts) / scale

    def lambda_points(self, ss) -> np.ndarray:
        """Lambda(s) for an array of complex strip points."""
        ss = np.asarray(ss, dtype=np.complex128).ravel()
        a = self.chi.a
        E = np.exp(0.5 * np.outer(ss, self.v))
        up = np.exp(0.5 * a * self.v)[None, :]
        dn = np.exp(0.5 * (1.0 + a) * self.v)[None, :]
        base = self.wt * self.theta
        return (E * up + dn / E) @ base


@lru_cache(maxsize=4)
def _theta_evaluator_cached(p: int, t_max: float) -> ThetaEvaluator:
    return ThetaEvaluator(QuadChar.make(p), t_max)


def hardy_Z(chi: QuadChar, t: float) -> float:
    """Z(t) = e^(i theta_p(t)) L(1/2+it, chi_p), real-valued."""
    return float(hardy_Z_grid(chi, np.array([float(t)]))[0])


def hardy_Z_grid(chi: QuadChar, ts) -> np.ndarray:
    """Z on an array of ordinates; theta path for |t| <= 12, AFE above."""
    ts = np.asarray(ts, dtype=np.float64)
    t_top = float(np.abs(ts).max(initial=0.0))
    if t_top > T_MAX:
        raise DomainError(f"|t| = {t_top} exceeds T_MAX = {T_MAX}")
    if t_top <= 12.0:
        ev = _theta_evaluator_cached(chi.p, 12.0)
        return ev.z(ts)
    lam = _afe_lambda_points(chi, 0.5 + 1j * ts)
    w = (0.5 + 1j * ts + chi.a) / 2.0
    scale = np.exp(w.real * _log_pf(chi.p) + np.real(log_gamma(w)))
    # Lambda(1/2+it) is real; the imaginary part is rounding noise
    return lam.real / scale


def lambda_on_points(chi: QuadChar, ss, t_max_hint: float | None = None) -> np.ndarray:
    """Lambda at arbitrary strip points, choosing the fast path when safe."""
    ss = np.asarray(ss, dtype=np.complex128)
    t_top = float(np.abs(ss.imag).max(initial=0.0))
    if t_top <= 12.0:
        ev = _theta_evaluator_cached(chi.p, 12.0)
        return ev.lambda_points(ss).reshape(ss.shape)
    return _afe_lambda_points(chi, ss).reshape(ss.shape)
