"""Central values across the family, the empirical nonvanishing proportion,
and the Fejer-kernel bound on the average central multiplicity.

Numerics cannot certify a central zero, so records are labeled "nonzero"
or "undetermined", never "zero".  The multiplicity statistic is bounded
through actual kernel-weighted near-zero mass: with r >= 0, r(0) = 1 and
K positive on the critical line, the double zero sum dominates the
average multiplicity, and its Fourier pairing evaluates to -1 + 2/lambda
up to the finite-X remainder, which is reported as measured slack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import density, numth
from .errors import DomainError
from .kernel import KernelSpec, MellinPair
from .lfunc import QuadChar, central_value, tol_zero
from .quadrature import adaptive_gauss
from .zeros import ZeroCache


@dataclass(frozen=True)
class CentralRecord:
    p: int
    central_value: float
    status: str          # "nonzero" | "undetermined"
    m_p_lower: int       # 0, or 2 when undetermined (central multiplicity is even)


def survey_central_values(X: int, v: int, tol_scale: float = 1e-8,
                          progress=None) -> list[CentralRecord]:
    """One record per sieved prime; deterministic given the tolerance policy."""
    ps = numth.sieve_primes(X, v).primes
    out = []
    for i, p in enumerate(ps):
        p = int(p)
        chi = QuadChar.make(p)
        val = central_value(chi)
        threshold = tol_scale * (p / math.pi) ** 0.25
        nonzero = abs(val) >= threshold
        out.append(CentralRecord(
            p=p, central_value=val,
            status="nonzero" if nonzero else "undetermined",
            m_p_lower=0 if nonzero else 2))
        if progress is not None and (i + 1) % 500 == 0:
            progress(i + 1, len(ps))
    return out


def nonvanishing_proportion(records) -> float:
    if not records:
        return float("nan")
    return sum(1 for r in records if r.status == "nonzero") / len(records)


@dataclass(frozen=True)
class FejerBoundResult:
    lam: float
    lhs_integral: float   # int F(alpha, X) r_hat(alpha) d alpha, by quadrature
    lhs_sum: float        # the same statistic from the double zero sum
    bound: float          # -1 + 2/lambda
    slack: float          # max(0, lhs - bound): the finite-X remainder

    @property
    def lhs(self) -> float:
        return self.lhs_sum

    @property
    def proportion_ceiling(self) -> float:
        """Central-zero proportion ceiling -1/4 + 1/(2 lambda) implied by
        the bound and the evenness of the central multiplicity."""
        return -0.25 + 0.5 / self.lam


def fejer_bound(lam: float, X: int, v: int, kernel: KernelSpec,
                cache: ZeroCache, T: float = density.DEFAULT_T) -> FejerBoundResult:
    """The multiplicity-bound chain at the Fejer test function r_lambda.

    lhs is the (1/4 K(1/2) Li X)-normalized kernel-weighted zero statistic,
    computed both as int F r_hat (quadrature) and as the direct double
    sum; the two must agree to quadrature accuracy.  bound = -1 + 2/lambda.
    """
    if not 0 < lam < 1:
        raise DomainError(f"Fejer bound requires 0 < lambda < 1, got {lam}")
    tf = density.fejer(lam)
    lhs_sum = density.one_level_density_empirical(
        X, v, tf, kernel, cache, T, normalization="form_factor")
    fam = density.family_zeros(X, v, kernel, cache, T)

    def integrand(alphas):
        return density.form_factor_values(fam, kernel, alphas) * tf.r_hat(alphas)

    lhs_int = float(np.real(adaptive_gauss(
        integrand, -lam, lam, abs_tol=1e-9, split_points=(0.0,))))
    bound = -1.0 + 2.0 / lam
    return FejerBoundResult(lam=lam, lhs_integral=lhs_int, lhs_sum=lhs_sum,
                            bound=bound, slack=max(0.0, lhs_sum - bound))


def mellin_half_identity(kernel: KernelSpec) -> float:
    """int_0^inf t^(1/2) a(t) dt/t, which must equal K(1/2)."""
    pair = MellinPair(kernel)

    def integrand(u):
        # t = e^u
        return pair.a(np.exp(u)) * np.exp(0.5 * u)

    return float(np.real(adaptive_gauss(integrand, -60.0, 60.0, abs_tol=1e-11)))
