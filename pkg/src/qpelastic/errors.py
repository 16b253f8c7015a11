"""Exception types raised by the library."""


class QPElasticError(Exception):
    """Base class for all library errors."""


class InvalidMedium(QPElasticError):
    """Medium parameters violate mu > 0, lambda + mu > 0, rho > 0 or omega > 0."""


class WoodAnomaly(QPElasticError):
    """A lattice mode sits too close to a cut-off (alpha_l^2 = k_p^2 or k_s^2).

    The spectral formulas divide by the vertical wavenumbers, so evaluation
    is refused rather than silently regularized.
    """

    def __init__(self, alpha_l, which, margin):
        self.alpha_l = alpha_l
        self.which = which
        self.margin = margin
        super().__init__(
            f"mode alpha_l={alpha_l!r} within {margin:.3e} of the {which} cut-off"
        )


class DomainError(QPElasticError):
    """Argument outside the function's domain (e.g. Hankel/Bessel-K at x <= 0)."""


class CoincidentPoints(QPElasticError):
    """Source and evaluation point coincide."""


class NearSourceLine(QPElasticError):
    """Transverse gap to the source line below gap_min; series too slow."""


class NearSourcePlane(QPElasticError):
    """|x3 - y3| below gap_min for the biperiodic series."""


class DegenerateModeBasis(QPElasticError):
    """Per-mode 2x2 extraction system is (near) singular."""


class AliasedGrid(QPElasticError):
    """Sampling grid too coarse for the requested number of modes."""


class TooCloseToBoundary(QPElasticError):
    """Field evaluation point too close to the grating for the quadrature."""


class ResonanceSuspected(QPElasticError):
    """Single-layer system ill-conditioned (spurious interior resonance)."""

    def __init__(self, cond):
        self.cond = cond
        super().__init__(f"condition estimate {cond:.3e} exceeds 1e12")


class GridMismatch(QPElasticError):
    """Two datasets sampled on different grids."""


class ConfigError(QPElasticError):
    """Invalid run configuration; carries the offending field path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
