"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array has the wrong shape for the requested operation."""


class HermiticityError(ValueError):
    """Matrix is not Hermitian within the accepted tolerance."""


class DistributionError(ValueError):
    """Distribution parameters violate their constraints."""


class CommutationError(ValueError):
    """A pair of operators fails the commutation precondition."""

    def __init__(self, index_a: int, index_b: int, norm: float):
        self.index_a = index_a
        self.index_b = index_b
        self.norm = norm
        super().__init__(
            f"operators {index_a} and {index_b} do not commute: "
            f"||[H_{index_a}, H_{index_b}]|| = {norm:.3e}"
        )


class ParseError(ValueError):
    """Text input is malformed; carries the offending location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)


class ConfigError(ValueError):
    """Run configuration is invalid; carries the offending key path."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")
