"""Degree arithmetic for divisors in higher-dimensional projective space."""
from __future__ import annotations

from dataclasses import dataclass

from .cluster import Certificate, noether_fano_certificate
from .errors import InputError


@dataclass(frozen=True)
class ScrollState:
    degree: int
    line_mult: int

    def __post_init__(self):
        if self.line_mult != self.degree - 1:
            raise InputError(f"line multiplicity {self.line_mult} != degree - 1")


@dataclass(frozen=True)
class ScrollStep:
    state: ScrollState
    next_degree: int        # 3d - 2(d-1) - 3
    next_line_mult: int     # 2d - (d-1) - 3


def scroll_reduction(d: int) -> list:
    """Reduce a degree-d surface with a line of multiplicity d-1 by the
    quadrics through the line and a general point, down to degree 2."""
    if not isinstance(d, int) or d < 2:
        raise InputError("degree must be an integer >= 2")
    steps = []
    state = ScrollState(d, d - 1)
    while True:
        n, m = state.degree, state.line_mult
        nd = 3 * n - 2 * m - 3
        nm = 2 * n - m - 3
        steps.append(ScrollStep(state, nd, nm))
        if n == 2:
            break
        if nd != n - 1 or nm != nd - 1:
            raise InputError(f"reduction formula broke at degree {n}")
        state = ScrollState(nd, nm)
    return steps


def scroll_trace(d: int) -> list:
    return [(s.state.degree, s.state.line_mult) for s in scroll_reduction(d)]


@dataclass(frozen=True)
class ProjectionPair:
    a: int
    b: int
    k: int

    def __post_init__(self):
        if not (2 <= self.a <= self.b) or self.k < 1:
            raise InputError(f"need 2 <= a <= b and k >= 1, got a={self.a}, b={self.b}, k={self.k}")


def ci_projection_certificate(p: ProjectionPair) -> Certificate:
    """A complete intersection of degrees a <= b projected from a general
    point: degree ab against ab - 1, multiplicities at most a."""
    cert = noether_fano_certificate(p.k + 1, p.a * p.b, p.a * p.b - 1, p.a)
    data = dict(cert.data)
    data.update({"a": p.a, "b": p.b, "k": p.k})
    return Certificate("CompleteIntersectionProjection", cert.holds, data)


__all__ = [
    "ScrollState", "ScrollStep", "scroll_reduction", "scroll_trace",
    "ProjectionPair", "ci_projection_certificate",
]
