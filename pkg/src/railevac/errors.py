"""Exception hierarchy.

Input problems derive from ``InputError`` (CLI exit code 1); problems with
the evacuation itself derive from ``InfeasibleError`` (exit code 2).
"""


class RailEvacError(Exception):
    """Base class for all package errors."""


class InputError(RailEvacError, ValueError):
    """Bad input data or arguments."""


class ParseError(InputError):
    def __init__(self, source: str, line: int, message: str):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


class UnknownStationError(InputError):
    def __init__(self, station_id: str, context: str = ""):
        self.station_id = station_id
        where = f" ({context})" if context else ""
        super().__init__(f"unknown station id {station_id!r}{where}")


class DuplicateStationError(InputError):
    def __init__(self, station_id: str, line: int | None = None):
        self.station_id = station_id
        at = f" at line {line}" if line is not None else ""
        super().__init__(f"duplicate station id {station_id!r}{at}")


class ContractError(InputError):
    """A precondition on shapes, ranges or parameter values was violated."""


class InfeasibleError(RailEvacError):
    """Blocked demand cannot be placed within reachable spare capacity."""

    def __init__(self, message: str, shortfall: float = 0.0):
        self.shortfall = float(shortfall)
        super().__init__(message)


class IsolationError(InfeasibleError):
    """A blocked station has no finite-cost unblocked target at all."""

    def __init__(self, station: str, demand: float = 0.0):
        self.station = station
        super().__init__(
            f"blocked station {station} has no reachable unblocked station within the horizon",
            shortfall=demand,
        )
