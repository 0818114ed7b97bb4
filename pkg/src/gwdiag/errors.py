"""Exception types raised across the package.

Every domain error derives from :class:`GwdiagError` so callers (and the CLI)
can catch one base class. Most also derive from :class:`ValueError`, which is
what generic numeric tooling expects for bad inputs.
"""

from __future__ import annotations

__all__ = [
    "GwdiagError",
    "NonFiniteError",
    "DuplicateIdError",
    "TooFewPointsError",
    "WrongBandwidthKindError",
    "NonPositiveBandwidthError",
    "DegenerateBandwidthError",
    "EmptySupportError",
    "NumericalBlowupError",
    "GridTooLargeError",
    "CoincidentPointsError",
    "ZeroVarianceError",
    "InvalidConfigError",
    "MissingColumnError",
    "ParseError",
    "UnknownScenarioError",
]


class GwdiagError(Exception):
    """Base class for all errors raised by gwdiag."""


class NonFiniteError(GwdiagError, ValueError):
    """A coordinate or value field is NaN or infinite."""

    def __init__(self, point_id: str, field: str, line: int | None = None):
        self.point_id = point_id
        self.field = field
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"non-finite value in field '{field}' of point '{point_id}'{where}")


class DuplicateIdError(GwdiagError, ValueError):
    """Two sample points share the same id."""

    def __init__(self, point_id: str, line: int | None = None):
        self.point_id = point_id
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate sample id '{point_id}'{where}")


class TooFewPointsError(GwdiagError, ValueError):
    def __init__(self, n: int, required: int, context: str = "sample set"):
        self.n = n
        self.required = required
        super().__init__(f"{context} has {n} points, needs at least {required}")


class WrongBandwidthKindError(GwdiagError, TypeError):
    """An adaptive-only operation was handed a fixed bandwidth (or vice versa)."""


class NonPositiveBandwidthError(GwdiagError, ValueError):
    def __init__(self, bandwidth: float):
        self.bandwidth = bandwidth
        super().__init__(f"kernel bandwidth must be > 0, got {bandwidth!r}")


class DegenerateBandwidthError(GwdiagError, ValueError):
    """Adaptive bandwidth resolved to 0 (all k nearest samples coincide with the center)."""

    def __init__(self, center: tuple[float, float]):
        self.center = center
        super().__init__(f"adaptive bandwidth degenerates to 0 at center {center}")


class EmptySupportError(GwdiagError, ValueError):
    """No sample point carries positive weight at the evaluation location."""

    def __init__(self, center: tuple[float, float] | None = None, bandwidth: float | None = None):
        self.center = center
        self.bandwidth = bandwidth
        msg = "no sample point inside kernel support"
        if center is not None:
            msg += f" at center {center}"
        if bandwidth is not None:
            msg += f" (bandwidth {bandwidth})"
        super().__init__(msg)


class NumericalBlowupError(GwdiagError, ArithmeticError):
    """A correlation left [-1, 1] by more than rounding tolerance."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"correlation magnitude {abs(value)} exceeds 1 beyond rounding tolerance")


class GridTooLargeError(GwdiagError, ValueError):
    def __init__(self, n_cells: int, cap: int):
        self.n_cells = n_cells
        self.cap = cap
        super().__init__(f"evaluation grid has {n_cells} cells, exceeding the cap of {cap}")


class CoincidentPointsError(GwdiagError, ValueError):
    """Two sample points occupy the same location; inverse-distance weights are undefined."""

    def __init__(self, id_a: str, id_b: str):
        self.id_a = id_a
        self.id_b = id_b
        super().__init__(
            f"sample points '{id_a}' and '{id_b}' are exactly coincident; "
            "jitter or deduplicate before computing inverse-distance weights"
        )


class ZeroVarianceError(GwdiagError, ValueError):
    def __init__(self, what: str = "deviations"):
        self.what = what
        super().__init__(f"all {what} are equal; statistic undefined")


class InvalidConfigError(GwdiagError, ValueError):
    pass


class MissingColumnError(GwdiagError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column '{name}' not found in header")


class ParseError(GwdiagError, ValueError):
    """A field of a delimited or gridded text file failed to parse.

    Carries the 1-based physical line number, the column name and the
    offending token.
    """

    def __init__(self, line: int, column: str, token: str):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}: cannot parse {column!r} value {token!r}")


class UnknownScenarioError(GwdiagError, ValueError):
    def __init__(self, name: str, known: tuple[str, ...]):
        self.name = name
        self.known = known
        super().__init__(f"unknown scenario '{name}'; expected one of {', '.join(known)}")
