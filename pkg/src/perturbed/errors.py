"""Exception hierarchy shared by every module of the package."""

from typing import Dict, List, Optional


class PerturbedError(Exception):
    """Root of all errors raised by the package."""


class ParameterError(PerturbedError, ValueError):
    """A parameter is out of range or cannot be realized."""


class ResourceGuardError(PerturbedError, RuntimeError):
    """An exact oracle refused an input above its size guard."""

    def __init__(self, what: str, limit: int, actual: int):
        self.what = what
        self.limit = limit
        self.actual = actual
        super().__init__(f"{what}: n={actual} exceeds the exact-search guard of {limit}")


class StructuralError(PerturbedError, ValueError):
    """A structure is malformed or a construction produced an invalid result."""


class HypothesisViolation(PerturbedError):
    """A constructive step could not be carried out because an assumption failed."""

    def __init__(self, assumption: str, detail: str):
        self.assumption = assumption
        self.detail = detail
        super().__init__(f"{assumption}: {detail}")


class PancyclicityFailure(HypothesisViolation):
    """Some cycle lengths could not be constructed."""

    def __init__(self, failures: Dict[int, HypothesisViolation], cycles: Dict[int, List[int]]):
        self.failures = failures
        self.cycles = cycles
        lengths = ", ".join(str(length) for length in sorted(failures))
        first: Optional[HypothesisViolation] = failures[min(failures)] if failures else None
        assumption = first.assumption if first else "pancyclicity"
        super().__init__(assumption, f"no cycle constructed for lengths [{lengths}]")


class EmissionError(PerturbedError, OSError):
    """Writing results to disk failed."""

    def __init__(self, path, cause: Exception):
        self.path = str(path)
        self.cause = cause
        super().__init__(f"failed to write {self.path}: {cause}")
