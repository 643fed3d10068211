"""
HR Lab errors
Every failure raised by the library derives from HrLabError so the CLI and the
HTTP routes can map them to exit codes / status codes in one place.
"""

from typing import Optional


class HrLabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(HrLabError, ValueError):
    """Numeric input outside an operation's domain (empty, non-finite, p > 1, ...)."""


class ShapeError(HrLabError, ValueError):
    """Dimensions of two operands do not chain."""


class ContractError(HrLabError, RuntimeError):
    """An operation was called in a state its contract forbids."""


class InvalidSpecError(HrLabError, ValueError):
    """A network or variant description cannot be built."""


class InvalidReferenceError(HrLabError, ValueError):
    """Score normalization references give a zero or negative denominator."""


class ConfigError(HrLabError):
    """Experiment config file is unreadable or fails validation."""


class CheckpointParseError(HrLabError):
    def __init__(self, message: str, block: Optional[str] = None):
        self.block = block
        where = f" (block '{block}')" if block else ""
        super().__init__(f"{message}{where}")


class UnsupportedVersionError(CheckpointParseError):
    def __init__(self, version: str):
        self.version = version
        super().__init__(f"Unsupported checkpoint version '{version}', expected 1", block="header")


class DivergenceError(HrLabError, RuntimeError):
    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"Training diverged at step {step}: loss = {loss}")
