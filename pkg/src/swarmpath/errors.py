"""Exception types shared across the simulator."""

from __future__ import annotations


class SimError(Exception):
    """Base class for all simulator errors."""


class ZeroDisplacement(SimError):
    """Two centers coincide where a direction is required."""


class NonFiniteInput(SimError):
    """An input contained NaN or Inf."""


class NonFiniteAction(NonFiniteInput):
    """An action contained NaN or Inf; carries the offending agent index."""

    def __init__(self, agent_index: int, slot: int | None = None):
        self.agent_index = agent_index
        self.slot = slot
        where = f"agent {agent_index}" if slot is None else f"slot {slot}, agent {agent_index}"
        super().__init__(f"non-finite action for {where}")


class EpisodeFinished(SimError):
    """step() called on a finished episode."""


class PlacementExhausted(SimError):
    """Rejection sampling ran out of attempts; the map is too dense."""

    def __init__(self, entity: str, attempts: int, slot: int | None = None):
        self.entity = entity
        self.attempts = attempts
        self.slot = slot
        prefix = "" if slot is None else f"slot {slot}: "
        super().__init__(f"{prefix}could not place {entity} after {attempts} attempts")


class DegenerateMap(SimError):
    """Generated map has too little free space to be usable."""


class RaggedGrid(SimError):
    """Text grid rows have inconsistent lengths."""

    def __init__(self, line: int, expected: int, got: int):
        self.line = line
        super().__init__(f"line {line}: expected {expected} characters, got {got}")


class UnknownGlyph(SimError):
    """Text grid contains a character outside the accepted alphabet."""

    def __init__(self, glyph: str, line: int, column: int):
        self.glyph = glyph
        self.line = line
        self.column = column
        super().__init__(f"unknown glyph {glyph!r} at line {line}, column {column}")


class HeaderMismatch(SimError):
    """Map file header disagrees with its body or is malformed."""


class NoPathFound(SimError):
    """Planner exhausted its iteration budget without reaching the goal."""


class InvalidEndpoint(SimError):
    """Planner start or goal collides with an inflated obstacle."""


class EmptyTrace(SimError):
    """Metrics requested for an empty episode trace."""


class EmptyInput(SimError):
    """A statistic was requested for an empty sample."""


class ConfigError(SimError):
    """Configuration failed validation; message names the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
