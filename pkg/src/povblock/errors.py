"""Exception types shared across the package."""


class PovBlockError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveInput(PovBlockError):
    """An input violated a positivity (or non-negativity) invariant.

    Carries the name of the offending field so callers can point at it.
    """

    def __init__(self, field: str, value, requirement: str = "> 0"):
        self.field = field
        self.value = value
        self.requirement = requirement
        super().__init__(f"{field} must be {requirement}, got {value!r}")


class ZeroVolatility(NonPositiveInput):
    """Annualized volatility of exactly zero: the price model requires sigma > 0."""

    def __init__(self, field: str = "annualized_vol"):
        super().__init__(field, 0.0, "> 0 (volatility cannot be zero)")


class InvalidVolumeProfile(PovBlockError):
    """A piecewise volume profile failed a structural invariant."""


class NegativeTime(PovBlockError):
    """A time argument was negative."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"time must be >= 0, got {t!r}")


class NonPositiveRate(PovBlockError):
    """A participation rate was zero or negative."""

    def __init__(self, rho: float):
        self.rho = rho
        super().__init__(f"participation rate must be > 0, got {rho!r}")


class NonPositivePhi(PovBlockError):
    """A convexity exponent was zero or negative."""

    def __init__(self, phi: float):
        self.phi = phi
        super().__init__(f"convexity exponent must be > 0, got {phi!r}")


class RequiresFlatCurve(PovBlockError):
    """The requested closed form is only defined for a constant volume curve."""


class BracketTooNarrow(PovBlockError):
    """The coarse grid minimum sat on the search bracket boundary.

    The true minimizer may lie outside the bracket; widen it and retry.
    """

    def __init__(self, rho_at_boundary: float, bracket):
        self.rho_at_boundary = rho_at_boundary
        self.bracket = bracket
        super().__init__(
            f"grid minimum at bracket boundary rho={rho_at_boundary:g} "
            f"(bracket {bracket}); the minimizer may lie outside"
        )


class InvalidConfig(PovBlockError):
    """A solver or simulation configuration value is unusable."""


class TooFewPaths(PovBlockError):
    """Distribution tests need enough paths for the asymptotics to apply."""

    def __init__(self, n_paths: int, minimum: int):
        self.n_paths = n_paths
        self.minimum = minimum
        super().__init__(f"need at least {minimum} paths, got {n_paths}")


class ParseError(PovBlockError):
    """A scenario file failed to parse or validate.

    ``field`` is a dotted path into the scenario document, e.g. ``impact.eta``.
    """

    def __init__(self, field: str, message: str, source: str = ""):
        self.field = field
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}{field}: {message}")


class UnknownParameter(PovBlockError):
    """A sweep was requested over a parameter the model does not expose."""

    def __init__(self, name: str, allowed):
        self.name = name
        self.allowed = tuple(allowed)
        super().__init__(f"unknown parameter {name!r}; expected one of {sorted(self.allowed)}")
