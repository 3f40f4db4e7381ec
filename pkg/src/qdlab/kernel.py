"""Analytic weight kernels K(s) on the critical strip and their Mellin
companions a(y).

A kernel must be analytic on -1 < Re s < 2, symmetric on the critical
line (K(1/2+it) = K(1/2-it)), nonzero at 1/2, and decay fast enough that
int |K(c+it)| log(|t|+2) dt converges.  The companion is

    a(y) = (1/2 pi i) int_(c) K(s) y^(-s) ds,

contour-independent for -1 < c < 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, KernelPropertyError
from .quadrature import adaptive_gauss

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel K with optional closed-form Mellin companion.

    `trunc_t(c)` gives the |t| beyond which |K(c+it)| < 1e-18; used to
    truncate contour integrals at the double-precision floor.
    """

    name: str
    K: Callable[[complex], complex]
    c_default: float = 0.5
    closed_form_a: Optional[Callable[[np.ndarray], np.ndarray]] = None
    trunc_t: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not (-1.0 < self.c_default < 2.0):
            raise KernelPropertyError(f"contour c={self.c_default} outside (-1, 2)")
        k_half = self.K(0.5 + 0.0j)
        if abs(k_half) < 1e-12:
            raise KernelPropertyError("K(1/2) must be nonzero")
        for t in (0.3, 1.7, 5.0):
            up = self.K(0.5 + 1j * t)
            dn = self.K(0.5 - 1j * t)
            if abs(up - dn) > 1e-12 * max(1.0, abs(up)):
                raise KernelPropertyError(
                    f"kernel {self.name!r} violates K(1/2+it)=K(1/2-it) at t={t}")

    @property
    def at_half(self) -> float:
        return float(np.real(self.K(0.5 + 0.0j)))

    def on_critical_line(self, gammas) -> np.ndarray:
        """K(1/2 + i*gamma) as a real array (imaginary parts ~ 0 by symmetry)."""
        g = np.asarray(gammas, dtype=float)
        vals = self.K(0.5 + 1j * g)
        return np.real(np.asarray(vals))


def _gauss_family(c0: float, name: str) -> KernelSpec:
    # K(s) = exp(c0 (s-1/2)^2);  a(y) = y^(-1/2) exp(-(log y)^2/(4 c0)) / (2 sqrt(pi c0))
    def K(s):
        z = np.asarray(s, dtype=complex) - 0.5
        return np.exp(c0 * z * z) if isinstance(s, np.ndarray) else complex(np.exp(c0 * z * z))

    def a_closed(y):
        y = np.asarray(y, dtype=float)
        ly = np.log(y)
        return np.exp(-ly * ly / (4.0 * c0)) / (np.sqrt(y) * 2.0 * math.sqrt(math.pi * c0))

    def trunc(c):
        # |K(c+it)| = exp(c0((c-1/2)^2 - t^2)) < 1e-18
        return math.sqrt((c - 0.5) ** 2 + 18.0 * math.log(10.0) / c0) + 0.5

    return KernelSpec(name=name, K=K, closed_form_a=a_closed, trunc_t=trunc)


GAUSS = _gauss_family(1.0, "gauss")
GAUSS2 = _gauss_family(2.0, "gauss2")

KERNELS = {"gauss": GAUSS, "gauss2": GAUSS2}


@dataclass(frozen=True)
class MellinPair:
    """A kernel together with its companion a(y) (fast path when closed form)."""

    spec: KernelSpec

    def a(self, y):
        if self.spec.closed_form_a is not None:
            out = self.spec.closed_form_a(np.asarray(y, dtype=float))
            return float(out) if np.ndim(y) == 0 else out
        if np.ndim(y) == 0:
            return a_numeric(self.spec, float(y))
        return np.array([a_numeric(self.spec, float(yy)) for yy in np.asarray(y)])


def eval_K(spec: KernelSpec, s) -> complex:
    s = complex(s)
    if not (-1.0 < s.real < 2.0):
        raise DomainError(f"kernel argument {s} outside the strip -1 < Re s < 2")
    return complex(spec.K(s))


def _trunc_height(spec: KernelSpec, c: float) -> float:
    if spec.trunc_t is not None:
        return spec.trunc_t(c)
    t = 1.0
    while t < 1e4:
        if abs(spec.K(c + 1j * t)) < 1e-18 and abs(spec.K(c + 1.3j * t)) < 1e-18:
            return t
        t *= 1.3
    raise DomainError(f"kernel {spec.name!r}: |K(c+it)| does not reach 1e-18 by |t|=1e4")


def a_numeric(spec: KernelSpec, y: float, c: Optional[float] = None) -> float:
    """a(y) by quadrature along Re s = c, truncated where |K| < 1e-18."""
    if y <= 0:
        raise DomainError(f"a(y) requires y > 0, got {y}")
    if c is None:
        c = spec.c_default
    if not (-1.0 < c < 2.0):
        raise DomainError(f"contour c={c} outside (-1, 2)")
    tmax = _trunc_height(spec, c)
    ly = math.log(y)

    def integrand(t):
        s = c + 1j * t
        return spec.K(s) * np.exp(-(c + 1j * t) * ly)

    val = adaptive_gauss(integrand, -tmax, tmax, abs_tol=1e-13 * max(1.0, y ** -c))
    return float(np.real(val)) / (2.0 * math.pi)


def a_closed_form(y, c0: float = 1.0):
    """Closed form of a(y) for the Gaussian kernel exp(c0 (s-1/2)^2).

    Derivation: a(y) = y^(-1/2)/(2 pi) int exp(-c0 t^2) exp(-i t log y) dt,
    a Gaussian Fourier transform; verified against a_numeric in the tests.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise DomainError("a(y) requires y > 0")
    ly = np.log(y_arr)
    out = np.exp(-ly * ly / (4.0 * c0)) / (np.sqrt(y_arr) * 2.0 * math.sqrt(math.pi * c0))
    return float(out) if np.ndim(y) == 0 else out


def mellin_recover_K(pair: MellinPair, s) -> complex:
    """int_0^inf a(t) t^(s-1) dt, which recovers K(s) on the strip."""
    s = complex(s)
    if not (-1.0 < s.real < 2.0):
        raise DomainError(f"Mellin argument {s} outside the strip")

    def integrand(u):
        # t = e^u
        return pair.a(np.exp(u)) * np.exp(s * u)

    # |a(e^u)| ~ exp(-u^2/(4 c0) - u/2); u = 40 is far past the 1e-18 floor
    return complex(adaptive_gauss(integrand, -40.0, 40.0, abs_tol=1e-11))
