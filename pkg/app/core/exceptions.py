import logging
from typing import List, Optional, Union

import click

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class ChainSystemError(Exception):
    """Base error; every subclass maps to one CLI exit code."""

    exit_code: int = EXIT_NUMERICAL

    def __init__(self, message: str, data: Union[dict, None] = None):
        self.message = message
        self.data = data
        super().__init__(message)


# ============= Scene errors =============
class SceneFileError(ChainSystemError):
    """Scene file missing, unreadable or unwritable."""
    exit_code = EXIT_SCENE


class SceneParseError(ChainSystemError):
    """Scene document is not valid JSON or does not match the file schema."""
    exit_code = EXIT_SCENE

    def __init__(self, line: Optional[int], message: str):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}", {"line": line})


class InvalidScene(ChainSystemError):
    """One or more scene invariants are violated; all of them are listed."""
    exit_code = EXIT_SCENE

    def __init__(self, violations: List[str], details: Optional[List[str]] = None):
        self.violations = violations
        self.details = details or list(violations)
        super().__init__(
            "invalid scene: " + "; ".join(self.details),
            {"violations": violations},
        )


# ============= Kinematics =============
class NoIntersection(ChainSystemError):
    """The three length spheres do not meet."""


class AmbiguousSolution(ChainSystemError):
    """The two trilateration solutions cannot be told apart by height."""


class NoConvergence(ChainSystemError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e} m)",
            {"iterations": iterations, "residual": residual},
        )


class DivergedGuess(ChainSystemError):
    """Iterates left the search box around the room."""


class DegeneratePose(ChainSystemError):
    """An attachment coincides with its anchor."""


# ============= Statics / accuracy =============
class SingularGeometry(ChainSystemError):
    """Chain directions cannot balance the load (coplanar or degenerate)."""


class SingularJacobian(ChainSystemError):
    """Pose is at a kinematic singularity."""


# ============= Trajectory =============
class UnreachableEndpoint(ChainSystemError):
    exit_code = EXIT_INFEASIBLE


class PathLeavesWorkspace(ChainSystemError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, s: float, violations: Optional[List[str]] = None):
        self.s = s
        self.violations = violations or []
        reason = f" ({', '.join(self.violations)})" if self.violations else ""
        super().__init__(f"path leaves the workspace at s={s:.6f} m{reason}", {"s": s})


class InfeasibleQuantization(ChainSystemError):
    """Quantized schedule needs more steps per tick than the drive allows."""


def handle_error(exc: ChainSystemError) -> int:
    """Report an error on the error stream and return its exit code."""
    logger.debug(f"{type(exc).__name__}: {exc.message}")
    click.echo(f"error: {type(exc).__name__}: {exc.message}", err=True)
    return exc.exit_code
