"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ImmersionError(Exception):
    """Base class for every error raised by this package."""


class GraphError(ImmersionError):
    pass


class UnknownEdge(GraphError):
    pass


class UnknownVertex(GraphError):
    pass


class EdgesNotAdjacentAtVia(GraphError):
    pass


class SameEdge(GraphError):
    pass


class OddDegree(GraphError):
    pass


class InvalidPairing(GraphError):
    pass


class NotSimple(GraphError):
    pass


class PreconditionViolated(ImmersionError):
    pass


class Infeasible(ImmersionError):
    pass


class HallViolated(ImmersionError):
    def __init__(self, message: str, violating_set=()):
        super().__init__(message)
        self.violating_set = tuple(violating_set)


class DigestMismatch(ImmersionError):
    pass


class LiftViolation(ImmersionError):
    def __init__(self, pair, vertex):
        super().__init__(f"lifted path for pair {pair} passes through branch vertex {vertex}")
        self.pair = pair
        self.vertex = vertex


class TargetUnreached(ImmersionError):
    def __init__(self, message: str, best_tree=None, best_degree: int | None = None):
        super().__init__(message)
        self.best_tree = best_tree
        self.best_degree = best_degree


class OddTotal(ImmersionError):
    pass


class DegreeTooLow(ImmersionError):
    def __init__(self, vertex: int, degree: int, required: int):
        super().__init__(f"vertex {vertex} has degree {degree} < {required}")
        self.vertex = vertex
        self.degree = degree
        self.required = required


class NoHighDegreeVertex(ImmersionError):
    pass


class InvariantBreach(ImmersionError):
    """An invariant the construction relies on failed; always a bug signal."""

    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"{which}: {detail}" if detail else which)
        self.which = which
        self.detail = detail


class BadParams(ImmersionError):
    pass


class FormatError(ImmersionError):
    pass
