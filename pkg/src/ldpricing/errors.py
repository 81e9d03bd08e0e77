"""Typed errors raised by the library."""


class LdpricingError(Exception):
    """Base class for all library errors."""


class SpecValidationError(LdpricingError):
    """A market description failed validation; ``path`` names the bad field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class CgfOverflowError(LdpricingError):
    """A custom CGF evaluation left the representable floating-point range."""

    def __init__(self, lam: float, detail: str = ""):
        self.lam = lam
        msg = f"custom CGF numerically infinite at lambda={lam!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class TailTruncationError(LdpricingError):
    """The tail-sum remainder cannot be bounded within the requested tolerance."""


class NotPositiveDefiniteError(LdpricingError):
    """Cholesky factorization hit a non-positive pivot; ``pivot`` is its index."""

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} has value {value!r}"
        )


class MissingHedgeError(LdpricingError):
    """A hedge representation (component or covariance entry) is missing."""


class PriceNotArbitrageFreeError(LdpricingError):
    """The quoted price lies outside the open arbitrage-free interval."""


class NearBoundaryError(LdpricingError):
    """The optimal quantity exceeded the bracket cap; the price sits too close to a bound."""


class MissingScalingError(LdpricingError):
    """No scaling rule is available for this market."""


class QuadratureError(LdpricingError):
    """Adaptive quadrature failed to converge."""


class NonConvexInputError(LdpricingError):
    """Sampled function violates convexity beyond tolerance."""


class UnsupportedFamilyError(LdpricingError):
    """The requested operation has no rule for this component family."""
