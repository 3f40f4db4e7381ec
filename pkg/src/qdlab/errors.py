"""Exception types shared across the package."""


class QdlabError(Exception):
    """Base class for package errors."""


class DomainError(QdlabError, ValueError):
    """Argument outside an operation's stated domain."""


class KernelPropertyError(QdlabError, ValueError):
    """A kernel failed one of its required analytic properties."""


class QuadratureError(QdlabError, RuntimeError):
    """A quadrature did not converge to the requested tolerance."""


class TruncationBudgetError(QdlabError, RuntimeError):
    """An evaluation would exceed the hard per-call term budget."""


class WindingError(QdlabError, RuntimeError):
    """Contour winding number too far from an integer to round."""


class UncertifiedZerosError(QdlabError, RuntimeError):
    """An operation required a certified zero list and got none."""


class MissingCacheError(QdlabError, RuntimeError):
    """Zero cache entries are absent for some required primes."""

    def __init__(self, missing, message=None):
        self.missing = sorted(int(p) for p in missing)
        if message is None:
            shown = ", ".join(str(p) for p in self.missing[:10])
            more = "" if len(self.missing) <= 10 else f" (+{len(self.missing) - 10} more)"
            message = f"zero cache missing for primes: {shown}{more}"
        super().__init__(message)
