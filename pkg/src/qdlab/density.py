"""Family statistics over {p <= X, p = v mod 4}: the explicit-formula
check, the diagonal diagnostic, the form factor and its main-term
prediction, and the one-level density with its scaling limit.

Normalization bookkeeping (the classic silent factor-2 trap): the form
factor and the Fourier-pairing identity use FORM_FACTOR_NORM = 1/4, the
one-level density statement uses DENSITY_NORM = 1/2, i.e. the density
value at a given test function is exactly half the paired form-factor
value.  Every operation states which constant it applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import numth
from .errors import DomainError, TruncationBudgetError, UncertifiedZerosError
from .kernel import KernelSpec, MellinPair
from .lfunc import QuadChar
from .quadrature import adaptive_gauss, composite_gauss
from .zeros import ZeroCache, ZeroList, load_zero_lists

FORM_FACTOR_NORM = 0.25
DENSITY_NORM = 0.5
DEFAULT_T = 8.0


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """An even pair (r, r_hat) with r_hat(a) = int r(u) e^(-2 pi i u a) du.

    `support_bound` is the least L with r_hat = 0 outside [-L, L]
    (np.inf when not compactly supported); `kinks` lists non-smooth
    points of r_hat for quadrature splitting.
    """

    name: str
    r: Callable[[np.ndarray], np.ndarray]
    r_hat: Callable[[np.ndarray], np.ndarray]
    support_bound: float
    closed_forms: bool = True
    kinks: tuple = ()


def fejer(lam: float) -> TestFunction:
    """r(u) = (sin(pi lam u)/(pi lam u))^2, triangular r_hat on [-lam, lam]."""
    if not 0 < lam < 2:
        raise DomainError(f"Fejer parameter must be in (0, 2), got {lam}")

    def r(u):
        s = np.sinc(lam * np.asarray(u, dtype=float))
        return s * s

    def r_hat(a):
        a = np.asarray(a, dtype=float)
        return np.maximum(lam - np.abs(a), 0.0) / (lam * lam)

    return TestFunction(name=f"fejer({lam:g})", r=r, r_hat=r_hat,
                        support_bound=lam, kinks=(-lam, 0.0, lam))


def gaussian() -> TestFunction:
    """Self-dual pair r(u) = r_hat(u) = exp(-pi u^2)."""

    def r(u):
        u = np.asarray(u, dtype=float)
        return np.exp(-math.pi * u * u)

    return TestFunction(name="gauss", r=r, r_hat=r, support_bound=np.inf)


def bump(lam: float) -> TestFunction:
    """Compactly supported smooth r_hat(a) = exp(-1/(1-(a/lam)^2)) on (-lam, lam);
    r recovered by quadrature of the inverse transform.
    """
    if lam <= 0:
        raise DomainError(f"bump support must be positive, got {lam}")

    def r_hat(a):
        a = np.asarray(a, dtype=float)
        x = np.clip(np.abs(a) / lam, 0.0, 1.0)
        out = np.zeros_like(x)
        inside = x < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
        return out

    def r(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        vals = np.array([
            2.0 * composite_gauss(lambda a: r_hat(a) * np.cos(2.0 * math.pi * uu * a),
                                  0.0, lam, panels=64)
            for uu in u
        ])
        return vals if np.ndim(u) else float(vals[0])

    return TestFunction(name=f"bump({lam:g})", r=r, r_hat=r_hat,
                        support_bound=lam, closed_forms=False)


def from_samples(alphas, values, support_bound: float, name="sampled") -> TestFunction:
    """User test function given as sampled r_hat on a grid."""
    alphas = np.asarray(alphas, dtype=float)
    values = np.asarray(values, dtype=float)

    def r_hat(a):
        return np.interp(np.asarray(a, dtype=float), alphas, values, left=0.0, right=0.0)

    def r(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        vals = np.array([
            2.0 * composite_gauss(lambda a: r_hat(a) * np.cos(2.0 * math.pi * uu * a),
                                  0.0, support_bound, panels=96)
            for uu in u
        ])
        return vals if np.ndim(u) else float(vals[0])

    return TestFunction(name=name, r=r, r_hat=r_hat,
                        support_bound=float(support_bound), closed_forms=False)


TEST_FUNCTIONS = {"fejer": fejer, "gauss": lambda: gaussian(), "bump": bump}


# ---------------------------------------------------------------------------
# Family zero data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyZeros:
    """Concatenated certified positive ordinates over a prime family."""

    X: int
    v: int
    T: float
    gammas: np.ndarray          # all positive ordinates, family-concatenated
    kernel_weights: np.ndarray  # K(1/2 + i gamma), aligned with gammas
    x_star: int                 # number of primes in the family


def _check_kernel_decay(kernel: KernelSpec, T: float) -> None:
    if abs(kernel.K(0.5 + 1j * T)) > 1e-14:
        raise DomainError(
            f"kernel {kernel.name!r} has |K(1/2+iT)| > 1e-14 at T={T}; "
            "zero lists this shallow would bias the kernel sums")


def family_zeros(X: int, v: int, kernel: KernelSpec, cache: ZeroCache,
                 T: float = DEFAULT_T) -> FamilyZeros:
    _check_kernel_decay(kernel, T)
    ps = numth.sieve_primes(X, v).primes
    lists = load_zero_lists(ps, T, cache)
    gam = np.concatenate([zl.gammas for zl in lists]) if lists else np.empty(0)
    return FamilyZeros(X=int(X), v=v, T=T, gammas=gam,
                       kernel_weights=kernel.on_critical_line(gam),
                       x_star=len(lists))


# ---------------------------------------------------------------------------
# Explicit formula
# ---------------------------------------------------------------------------

_EF_LOG_CUT = 12.5  # |log(n/x)| beyond which |a(n/x)| Lambda(n) < 1e-16 sqrt(x)
_EF_N_CAP = 300_000_000


@dataclass(frozen=True)
class ExplicitFormulaSides:
    lhs: complex
    rhs: complex
    residual: float
    # known archimedean content of the residual: the trivial zero of L at
    # s=0 contributes K(0)/sqrt(x) when the character is even (p = 1 mod 4)
    trivial_zero_term: float = 0.0


def explicit_formula_sides(chi: QuadChar, x: float, kernel: KernelSpec,
                           zero_list: ZeroList) -> ExplicitFormulaSides:
    """Both sides of the kernel-weighted explicit formula at scale x.

    lhs sums K(rho) x^(i gamma) over all zeros (+/- gamma); rhs is the
    von Mangoldt character sum plus the conductor term,
    -x^(-1/2) sum_n a(n/x) Lambda(n) chi(n) + x^(-1/2) a(1/x) log(p/2pi).
    The residual carries the remaining O(x^(-1/2)) content (archimedean
    terms and, for p = 1 mod 4, the trivial zero at s = 0).
    """
    if x < 1:
        raise DomainError(f"explicit formula requires x >= 1, got {x}")
    if not zero_list.certified:
        raise UncertifiedZerosError(f"zero list for p={chi.p} is not certified")
    _check_kernel_decay(kernel, zero_list.T)

    g = zero_list.gammas
    w = kernel.on_critical_line(g)
    lhs = complex(2.0 * (w * np.cos(g * math.log(x))).sum())

    pair = MellinPair(kernel)
    n_cut = int(x * math.exp(_EF_LOG_CUT)) + 1
    if n_cut > _EF_N_CAP:
        raise TruncationBudgetError(
            f"explicit-formula n-sum needs {n_cut} terms at x={x}; cap {_EF_N_CAP}")

    tab = numth.legendre_table(chi.p)
    total = 0.0
    for block in numth.iter_prime_blocks(n_cut):
        q = block
        total += float((np.log(q) * tab[q % chi.p] * pair.a(q / x)).sum())
    # prime powers q^k, k >= 2
    for q in numth._simple_sieve(math.isqrt(n_cut)):
        q = int(q)
        qk = q * q
        while qk <= n_cut:
            total += math.log(q) * int(tab[qk % chi.p]) * float(pair.a(qk / x))
            qk *= q
    rx = 1.0 / math.sqrt(x)
    rhs = complex(-rx * total + rx * pair.a(1.0 / x) * math.log(chi.p / (2.0 * math.pi)))
    trivial = rx * float(np.real(kernel.K(0.0 + 0.0j))) if chi.a == 0 else 0.0
    return ExplicitFormulaSides(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
                                trivial_zero_term=trivial)


def diagonal_diagnostic(X: int, v: int, x: float, kernel: KernelSpec):
    """(A1_numeric, A1_main): the perfect-square part of the explicit-formula
    double sum against its main term -K(1/2) Li(X) / 4.
    """
    if x < 1:
        raise DomainError(f"diagonal diagnostic requires x >= 1, got {x}")
    pair = MellinPair(kernel)
    m_cut = int(math.sqrt(x) * math.exp(_EF_LOG_CUT / 2.0)) + 1

    # sum over prime powers m = q^j of log(q) a(m^2/x)
    s_all = 0.0
    for q in numth._simple_sieve(m_cut):
        q = int(q)
        lg = math.log(q)
        m = q
        while m <= m_cut:
            s_all += lg * float(pair.a(m * m / x))
            m *= q

    ps = numth.sieve_primes(X, v).primes
    correction = 0.0
    for p in ps[ps <= m_cut]:
        p = int(p)
        lg = math.log(p)
        m = p
        while m <= m_cut:
            correction += lg * float(pair.a(m * m / x))
            m *= p

    a1_numeric = -(ps.size * s_all - correction) / math.sqrt(x)
    a1_main = -0.25 * kernel.at_half * numth.li(X)
    return a1_numeric, a1_main


# ---------------------------------------------------------------------------
# Form factor and one-level density
# ---------------------------------------------------------------------------

def _norm(kind: str, kernel: KernelSpec, X: int) -> float:
    c = FORM_FACTOR_NORM if kind == "form_factor" else DENSITY_NORM
    return c * kernel.at_half * numth.li(X)


def form_factor_values(fam: FamilyZeros, kernel: KernelSpec, alphas) -> np.ndarray:
    """F(alpha, X) on an alpha grid from cached zeros (1/4-normalization)."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    lnX = math.log(fam.X)
    mat = np.cos(np.outer(alphas * lnX, fam.gammas))
    vals = 2.0 * (mat @ fam.kernel_weights) / _norm("form_factor", kernel, fam.X)
    return vals


def form_factor(X: int, v: int, alpha: float, kernel: KernelSpec,
                cache: ZeroCache, T: float = DEFAULT_T) -> float:
    fam = family_zeros(X, v, kernel, cache, T)
    return float(form_factor_values(fam, kernel, [alpha])[0])


def form_factor_prediction(X: int, alpha: float, kernel: KernelSpec) -> float:
    """Main terms: -1 + (K(1/2)/2)^-1 X^(-|a|/2) a(X^-|a|) (X - Li(X) log 2pi)/Li(X)."""
    if X < 2:
        raise DomainError(f"prediction requires X >= 2, got {X}")
    pair = MellinPair(kernel)
    aa = abs(alpha)
    li_x = numth.li(X)
    scale = (X - li_x * math.log(2.0 * math.pi)) / li_x
    return -1.0 + (X ** (-aa / 2.0)) * float(pair.a(X ** (-aa))) * scale / (
        0.5 * kernel.at_half)


@dataclass(frozen=True)
class FormFactorGrid:
    X: int
    v: int
    kernel: str
    alphas: np.ndarray
    values: np.ndarray
    prediction: np.ndarray


def form_factor_grid(X: int, v: int, alphas, kernel: KernelSpec,
                     cache: ZeroCache, T: float = DEFAULT_T) -> FormFactorGrid:
    fam = family_zeros(X, v, kernel, cache, T)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    vals = form_factor_values(fam, kernel, alphas)
    pred = np.array([form_factor_prediction(X, a, kernel) for a in alphas])
    return FormFactorGrid(X=int(X), v=v, kernel=kernel.name,
                          alphas=alphas, values=vals, prediction=pred)


def one_level_density_empirical(X: int, v: int, tf: TestFunction,
                                kernel: KernelSpec, cache: ZeroCache,
                                T: float = DEFAULT_T,
                                normalization: str = "density") -> float:
    """The normalized double sum sum_p sum_rho K(rho) r(gamma log X / 2pi).

    normalization="density" applies (1/2 K(1/2) Li X)^-1 (the one-level
    density statement, limit integral against 1 - sinc); "form_factor"
    applies (1/4 ...)^-1 (the Fourier-pairing side, twice as large).
    """
    if normalization not in ("density", "form_factor"):
        raise DomainError(f"unknown normalization {normalization!r}")
    fam = family_zeros(X, v, kernel, cache, T)
    u = fam.gammas * (math.log(X) / (2.0 * math.pi))
    total = 2.0 * float((fam.kernel_weights * tf.r(u)).sum())
    return total / _norm(normalization, kernel, X)


def pairing_identity_check(X: int, v: int, tf: TestFunction, kernel: KernelSpec,
                           cache: ZeroCache, T: float = DEFAULT_T) -> float:
    """|int F(alpha, X) r_hat(alpha) d alpha  -  normalized double sum|.

    A Fourier-inversion identity on the truncated zero set; the residual
    is pure quadrature error.
    """
    if not np.isfinite(tf.support_bound):
        raise DomainError("pairing check needs a compactly supported r_hat")
    fam = family_zeros(X, v, kernel, cache, T)

    def integrand(alphas):
        return form_factor_values(fam, kernel, alphas) * tf.r_hat(alphas)

    L = tf.support_bound
    integral = adaptive_gauss(integrand, -L, L, abs_tol=1e-9,
                              split_points=tuple(k for k in tf.kinks if -L < k < L))
    double_sum = one_level_density_empirical(X, v, tf, kernel, cache, T,
                                             normalization="form_factor")
    return abs(float(np.real(integral)) - double_sum)


# ---------------------------------------------------------------------------
# The scaling limit
# ---------------------------------------------------------------------------

def limit_density(tf: TestFunction) -> float:
    """int r(a) (1 - sin(2 pi a)/(2 pi a)) da via the Fourier side:
    r_hat(0) - (1/2) int_{-1}^{1} r_hat(u) du  (exact for compact support).
    """
    i1 = float(tf.r_hat(np.array([0.0]))[0])
    L = min(1.0, tf.support_bound)
    splits = tuple(k for k in tf.kinks if -L < k < L)
    i2 = float(np.real(adaptive_gauss(tf.r_hat, -L, L, abs_tol=1e-12,
                                      split_points=splits)))
    return i1 - 0.5 * i2


def _si_asymptotic(x: float) -> float:
    # Si(x) for large x; error ~ 720/x^6, used only for x >= 3000
    x2 = 1.0 / (x * x)
    P = 1.0 - 2.0 * x2 + 24.0 * x2 * x2
    Q = 1.0 - 6.0 * x2 + 120.0 * x2 * x2
    return 0.5 * math.pi - math.cos(x) / x * P - math.sin(x) / (x * x) * Q


def limit_density_quadrature(tf: TestFunction, window: Optional[float] = None) -> float:
    """Direct quadrature of int r(a)(1 - sinc(2 pi a)) da (cross-check path).

    For the Fejer pair the 1/a^2 tail of r is integrated analytically via
    the sine integral; other test functions must decay inside `window`.
    """

    def integrand(a):
        a = np.asarray(a, dtype=float)
        return tf.r(a) * (1.0 - np.sinc(2.0 * a))

    if tf.name.startswith("fejer"):
        lam = tf.support_bound
        A = max(window or 0.0, 4000.0 / lam)
        core = composite_gauss(integrand, 0.0, A, panels=int(4 * A), order=16)
        # int_A^inf r = (1/(pi lam)) [sin^2(w)/w + pi/2 - Si(2w)], w = pi lam A
        wA = math.pi * lam * A
        tail = (math.sin(wA) ** 2 / wA + 0.5 * math.pi - _si_asymptotic(2.0 * wA)) / (
            math.pi * lam)
        return 2.0 * float(np.real(core)) + 2.0 * tail
    A = window if window is not None else 12.0
    return 2.0 * float(np.real(adaptive_gauss(integrand, 0.0, A, abs_tol=1e-11)))


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

@dataclass
class DensityReport:
    X: int
    v: int
    test_function: str
    empirical: float            # DENSITY_NORM (1/2) normalization
    limit_value: float
    ratios_value: Optional[float]
    X_star: int
    diagnostics: dict = field(default_factory=dict)


def build_density_report(X: int, v: int, tf: TestFunction, kernel: KernelSpec,
                         cache: ZeroCache, T: float = DEFAULT_T,
                         ratios_value: Optional[float] = None) -> DensityReport:
    fam = family_zeros(X, v, kernel, cache, T)
    emp = one_level_density_empirical(X, v, tf, kernel, cache, T)
    diag = {
        "empirical_form_factor_norm": 2.0 * emp,
        "normalization_note": "empirical uses (1/2 K(1/2) Li X)^-1; "
                              "the form-factor pairing value is twice it",
        "zero_count": int(fam.gammas.size),
        "T": T,
    }
    return DensityReport(X=int(X), v=v, test_function=tf.name, empirical=emp,
                         limit_value=limit_density(tf), ratios_value=ratios_value,
                         X_star=fam.x_star, diagnostics=diag)
