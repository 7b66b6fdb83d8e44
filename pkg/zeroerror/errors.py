"""
Exception hierarchy for the zero-error graph entropy toolkit
"""

from typing import Optional


class ZeroErrorToolkitError(Exception):
    """Base class for every error raised by the toolkit"""
    exit_code = 1


class GraphValidationError(ZeroErrorToolkitError, ValueError):
    """Invalid graph, weight vector, subset or family input"""
    exit_code = 2


class GraphFormatError(GraphValidationError):
    """Malformed JSON input file"""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None,
                 field: Optional[str] = None):
        self.path = path
        self.line = line
        self.column = column
        self.field = field
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if field:
            location.append(f"field '{field}'")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class TypeDenominatorError(GraphValidationError):
    """Weight vector is not a type with denominator within the cap"""


class CapExceededError(ZeroErrorToolkitError):
    """A configured resource cap would be exceeded"""
    exit_code = 3

    def __init__(self, cap_name: str, limit: int, requested: int):
        self.cap_name = cap_name
        self.limit = limit
        self.requested = requested
        super().__init__(f"{cap_name} cap exceeded: requested {requested}, limit {limit}")


class NotExactError(ZeroErrorToolkitError):
    """A verifier needs an exact value but the classifier only has bounds"""
    exit_code = 2


class DecodeAmbiguityError(ZeroErrorToolkitError):
    """Zero-error decoder found no candidate or more than one"""

    def __init__(self, candidates: int, block: object = None):
        self.candidates = candidates
        self.block = block
        super().__init__(f"decoder found {candidates} candidates for block {block!r}")
