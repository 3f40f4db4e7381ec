"""Complex special functions with stated accuracy contracts.

log-gamma, digamma, Riemann zeta, zeta'/zeta, and the upper incomplete
gamma function used by the L-function evaluator.  Everything is double
precision; each contract below is stated against that.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .quadrature import _gl_nodes

EULER_GAMMA = 0.57721566490153286061

# Stieltjes constants gamma_0..gamma_8, 20 digits, derived by
# tools/derive_stieltjes.py (Euler-Maclaurin zeta near s=1 + Cauchy coefficients).
STIELTJES = (
    0.57721566490153286061,
    -0.072815845483676724861,
    -0.0096903631928723184845,
    0.0020538344203033458662,
    0.0023253700654673000575,
    0.00079332381730106270175,
    -0.00023876934543019960987,
    -0.00052728956705775104607,
    -0.00035212335380303950960,
)

# B_2, B_4, ..., B_24 (exact rationals, rounded to double)
_BERN = tuple(
    num / den
    for num, den in [
        (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730),
        (7, 6), (-3617, 510), (43867, 798), (-174611, 330),
        (854513, 138), (-236364091, 2730),
    ]
)


@dataclass(frozen=True)
class AccuracyContract:
    abs_tol: float
    rel_tol: float
    domain: str


CONTRACTS = {
    "log_gamma": AccuracyContract(0.0, 1e-12, "|s| <= 100, s not a non-positive integer"),
    "digamma": AccuracyContract(0.0, 1e-11, "|s| <= 100, s not a non-positive integer"),
    "zeta": AccuracyContract(0.0, 1e-10, "Re s >= -1, |Im s| <= 200, s != 1"),
    "zeta_log_deriv": AccuracyContract(0.0, 1e-9, "Re s >= 1 - 1/log(|Im s|+2)"),
    "upper_incomplete_gamma": AccuracyContract(0.0, 1e-10, "Re s in [-2, 4], 0 < x <= 500"),
}


def _as_complex_array(s):
    arr = np.asarray(s, dtype=np.complex128)
    return arr, arr.ndim == 0


def _check_poles(arr):
    bad = (arr.real <= 0) & (arr.imag == 0) & (arr.real == np.round(arr.real))
    if np.any(bad):
        raise DomainError("argument at a gamma pole (non-positive integer)")


_LOG_2PI = math.log(2.0 * math.pi)


def log_gamma(s):
    """Principal-branch log Gamma(s).

    Stirling series after shifting the argument until Re s >= 10; the
    shift uses principal logs, which stays on the canonical branch off
    the negative real axis.  rel err < 1e-12 for |s| <= 100.
    """
    z, scalar = _as_complex_array(s)
    _check_poles(z)
    z = z.copy()
    shift = np.zeros_like(z)
    for _ in range(120):
        mask = z.real < 10.0
        if not mask.any():
            break
        shift[mask] += np.log(z[mask])
        z[mask] += 1.0
    out = (z - 0.5) * np.log(z) - z + 0.5 * _LOG_2PI
    zi = 1.0 / z
    z2 = zi * zi
    term = zi
    for k, b in enumerate(_BERN, start=1):
        out += b / (2 * k * (2 * k - 1)) * term
        term *= z2
    out -= shift
    return complex(out) if scalar else out


def gamma(s):
    """Gamma(s) via exp(log_gamma)."""
    return np.exp(log_gamma(s))


def digamma(s):
    """psi(s) with rel err < 1e-11 for |s| <= 100."""
    z, scalar = _as_complex_array(s)
    _check_poles(z)
    z = z.copy()
    shift = np.zeros_like(z)
    for _ in range(120):
        mask = z.real < 10.0
        if not mask.any():
            break
        shift[mask] += 1.0 / z[mask]
        z[mask] += 1.0
    out = np.log(z) - 0.5 / z
    z2 = 1.0 / (z * z)
    term = z2
    for k, b in enumerate(_BERN, start=1):
        out -= b / (2 * k) * term
        term *= z2
    out -= shift
    return complex(out) if scalar else out


def _zeta_laurent(w):
    # zeta(1+w) = 1/w + sum_k (-1)^k gamma_k w^k / k!
    acc = 1.0 / w
    fact = 1.0
    wp = 1.0 + 0.0j
    for k, g in enumerate(STIELTJES):
        if k:
            fact *= k
            wp *= w
        acc += (-1) ** k * g * wp / fact
    return acc


def _zeta_em(s, want_deriv=False):
    N = max(10, int(math.ceil(abs(s.imag))))
    ns = np.arange(1, N, dtype=np.float64)
    logns = np.log(ns)
    pows = np.exp(-s * logns)
    z = pows.sum()
    if want_deriv:
        dz = -(logns * pows).sum()
    logN = math.log(N)
    NmS = np.exp(-s * logN)
    tail = NmS * N / (s - 1.0)
    z += tail + 0.5 * NmS
    if want_deriv:
        dz += tail * (-logN - 1.0 / (s - 1.0)) - 0.5 * logN * NmS
    poch = s
    dpoch = 1.0 + 0.0j
    Npow = NmS / N
    fact = 2.0
    for k, b in enumerate(_BERN, start=1):
        c = b / fact
        z += c * poch * Npow
        if want_deriv:
            dz += c * Npow * (dpoch - logN * poch)
        # extend poch = s(s+1)...(s+2k) for the next term, product rule for dpoch
        f1 = s + 2 * k - 1
        f2 = s + 2 * k
        dpoch = dpoch * f1 * f2 + poch * (f1 + f2)
        poch = poch * f1 * f2
        Npow /= N * N
        fact *= (2 * k + 1) * (2 * k + 2)
    return (z, dz) if want_deriv else (z, None)


def zeta(s):
    """Riemann zeta by Euler-Maclaurin; rel err < 1e-10 for Re s >= -1,
    |Im s| <= 200.  Inside |s-1| < 0.1 switches to the Laurent series with
    Stieltjes constants so the pole region is stable.
    """
    s = complex(s)
    if s == 1.0:
        raise DomainError("zeta pole at s = 1")
    if abs(s - 1.0) < 0.1:
        return _zeta_laurent(s - 1.0)
    z, _ = _zeta_em(s)
    return z


def zeta_log_deriv(s):
    """zeta'/zeta(s); near s=1 uses the Laurent form -1/w + g'(w)/(1+g(w))."""
    s = complex(s)
    if s == 1.0:
        raise DomainError("zeta pole at s = 1")
    w = s - 1.0
    if abs(w) < 0.1:
        # zeta(1+w) = (1+g(w))/w with g(w) = sum_k (-1)^k gamma_k w^(k+1)/k!
        g = 0.0 + 0.0j
        dg = 0.0 + 0.0j
        fact = 1.0
        wp = w
        for k, gk in enumerate(STIELTJES):
            if k:
                fact *= k
                wp *= w
            c = (-1) ** k * gk / fact
            g += c * wp
            dg += c * (k + 1) * (wp / w)
        return -1.0 / w + dg / (1.0 + g)
    z, dz = _zeta_em(s, want_deriv=True)
    if z == 0:
        raise DomainError(f"zeta vanishes at {s}; log-derivative undefined")
    return dz / z


# ---------------------------------------------------------------------------
# Upper incomplete gamma
# ---------------------------------------------------------------------------

_CF_MAXIT = 800
_SER_MAXIT = 600
_TINY = 1e-290


def _cf_loop(w, x, out):
    # Modified Lentz continued fraction for Gamma(w, x), x >= |w|+1
    for i in range(w.size):
        ww = w[i]
        xx = x[i]
        b = xx + 1.0 - ww
        c = 1.0 / _TINY + 0.0j
        d = 1.0 / b if b != 0 else 1.0 / _TINY + 0.0j
        h = d
        for k in range(1, _CF_MAXIT):
            a = -k * (k - ww)
            b = b + 2.0
            d = a * d + b
            if abs(d) < _TINY:
                d = _TINY + 0.0j
            c = b + a / c
            if abs(c) < _TINY:
                c = _TINY + 0.0j
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if abs(delta - 1.0) < 1e-16:
                break
        out[i] = np.exp(-xx + ww * np.log(xx)) * h


def _series_loop(w, x, gw, out):
    # Gamma(w) - lower-gamma power series, for x < |w|+1 away from poles
    for i in range(w.size):
        ww = w[i]
        xx = x[i]
        if xx == 0.0:
            out[i] = gw[i]
            continue
        term = 1.0 / ww
        tot = term
        for k in range(1, _SER_MAXIT):
            term = term * xx / (ww + k)
            tot = tot + term
            if abs(term) < 1e-17 * abs(tot):
                break
        out[i] = gw[i] - np.exp(-xx + ww * np.log(xx)) * tot


_HAVE_NUMBA = False
if not os.environ.get("QDLAB_NO_NUMBA"):
    try:
        from numba import njit

        _cf_loop = njit(cache=True)(_cf_loop)
        _series_loop = njit(cache=True)(_series_loop)
        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


def _cf_numpy(w, x):
    b = x + 1.0 - w
    c = np.full(w.shape, 1.0 / _TINY, dtype=np.complex128)
    d = np.where(b != 0, b, _TINY).astype(np.complex128)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(w.shape, dtype=bool)
    for k in range(1, _CF_MAXIT):
        if not active.any():
            break
        a = -k * (k - w[active])
        b[active] += 2.0
        dd = a * d[active] + b[active]
        dd = np.where(np.abs(dd) < _TINY, _TINY, dd)
        cc = b[active] + a / c[active]
        cc = np.where(np.abs(cc) < _TINY, _TINY, cc)
        dd = 1.0 / dd
        delta = dd * cc
        h[active] *= delta
        d[active] = dd
        c[active] = cc
        still = np.abs(delta - 1.0) >= 1e-16
        idx = np.nonzero(active)[0]
        active[idx[~still]] = False
    return np.exp(-x + w * np.log(x)) * h


def _series_numpy(w, x, gw):
    out = gw.astype(np.complex128).copy()
    live = x > 0
    term = np.zeros(w.shape, dtype=np.complex128)
    tot = np.zeros(w.shape, dtype=np.complex128)
    term[live] = 1.0 / w[live]
    tot[live] = term[live]
    active = live.copy()
    for k in range(1, _SER_MAXIT):
        if not active.any():
            break
        term[active] *= x[active] / (w[active] + k)
        tot[active] += term[active]
        idx = np.nonzero(active)[0]
        done = np.abs(term[idx]) < 1e-17 * np.abs(tot[idx])
        active[idx[done]] = False
    out[live] -= np.exp(-x[live] + w[live] * np.log(x[live])) * tot[live]
    return out


def _p3_quadrature(w, x):
    """Direct quadrature of int_x^inf t^(w-1) e^-t dt for w near a pole.

    Split at t=2: log-substituted panels below (resolves the t^(w-1)
    shoulder), plain panels up to A = |w|+45 above; the tail beyond A is
    below 1e-19 of the result scale and is dropped.
    """
    out = np.zeros(w.shape, dtype=np.complex128)
    xg, wg = _gl_nodes(16)
    wg = wg.astype(np.complex128)
    A = float(np.abs(w).max()) + 45.0

    # u-part: t = e^u on [log x, log 2]; lanes with x >= 2 get zero span
    lo = np.log(np.minimum(x, 2.0))
    span = math.log(2.0) - lo
    n_pan = max(2, int(math.ceil(span.max() / 0.5)))
    edges = lo[:, None] + span[:, None] * np.linspace(0.0, 1.0, n_pan + 1)[None, :]
    mid = 0.5 * (edges[:, :-1] + edges[:, 1:])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    nodes = mid[:, :, None] + half[:, :, None] * xg[None, None, :]
    vals = np.exp(w[:, None, None] * nodes - np.exp(nodes))
    out += ((vals @ wg) * half).sum(axis=1)

    # t-part: per-lane [max(x, 2), A], panels of width <= 1
    start = np.maximum(x, 2.0)
    n2 = max(4, int(math.ceil((A - 2.0) / 1.0)))
    e2 = start[:, None] + (A - start)[:, None] * np.linspace(0.0, 1.0, n2 + 1)[None, :]
    m2 = 0.5 * (e2[:, :-1] + e2[:, 1:])
    h2 = 0.5 * (e2[:, 1:] - e2[:, :-1])
    nd = m2[:, :, None] + h2[:, :, None] * xg[None, None, :]
    v2 = np.exp((w[:, None, None] - 1.0) * np.log(nd) - nd)
    out += ((v2 @ wg) * h2).sum(axis=1)
    return out


def upper_gamma_vec(w, x):
    """Gamma(w, x) for complex w and real x > 0, broadcast over arrays.

    Series for x < |w|+1, continued fraction otherwise; arguments within
    0.25 of a gamma pole fall back to direct quadrature.
    """
    w_arr = np.asarray(w, dtype=np.complex128)
    x_arr = np.asarray(x, dtype=np.float64)
    w_b, x_b = np.broadcast_arrays(w_arr, x_arr)
    shape = w_b.shape
    wf = np.ascontiguousarray(w_b).ravel()
    xf = np.ascontiguousarray(x_b.astype(np.float64)).ravel()
    if np.any(xf < 0):
        raise DomainError("upper incomplete gamma requires x > 0")
    out = np.empty(wf.shape, dtype=np.complex128)

    cf = xf >= np.abs(wf) + 1.0
    nearest = np.minimum(np.round(wf.real), 0.0)
    near_pole = np.abs(wf - nearest) < 0.25
    ser = ~cf & ~near_pole
    p3 = ~cf & near_pole

    if cf.any():
        sub = np.empty(int(cf.sum()), dtype=np.complex128)
        if _HAVE_NUMBA:
            _cf_loop(wf[cf], xf[cf], sub)
        else:
            sub = _cf_numpy(wf[cf], xf[cf])
        out[cf] = sub
    if ser.any():
        gw = np.exp(log_gamma(wf[ser]))
        gw = np.asarray(gw, dtype=np.complex128).reshape(-1)
        sub = np.empty(int(ser.sum()), dtype=np.complex128)
        if _HAVE_NUMBA:
            _series_loop(wf[ser], xf[ser], gw, sub)
        else:
            sub = _series_numpy(wf[ser], xf[ser], gw)
        out[ser] = sub
    if p3.any():
        out[p3] = _p3_quadrature(wf[p3], xf[p3])

    return out.reshape(shape)


def upper_incomplete_gamma(s, x):
    """Gamma(s, x) = int_x^inf t^(s-1) e^-t dt for complex s, real x > 0.

    rel err < 1e-10 on the validated region Re s in [-2, 4], x <= 500.
    """
    x = float(x)
    if not x > 0:
        raise DomainError(f"upper incomplete gamma requires x > 0, got {x}")
    return complex(upper_gamma_vec(np.complex128(s), np.float64(x)))
