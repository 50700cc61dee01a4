"""Intersection lattices of blown-up rational surfaces.

This module knows nothing about clusters or curves; it is the independent
referee for the class bookkeeping done elsewhere.  Classes are integer tuples
in a fixed basis.  A contraction is recorded by quotienting: the contracted
class E is stored and every class X is read through the projection
X -> X + (X.E) E, which is the pushforward numerics since E^2 = -1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import InputError, InvariantViolation

DivisorClass = tuple


@dataclass(frozen=True)
class BlowupSurface:
    gram: tuple
    canonical: tuple
    basis_labels: tuple
    contracted: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        """Picard rank of the current (contracted) surface."""
        return self.dim - len(self.contracted)

    def vector(self, **coeffs) -> tuple:
        v = [0] * self.dim
        for label, x in coeffs.items():
            v[self.basis_labels.index(label)] = x
        return tuple(v)

    def basis_vector(self, label) -> tuple:
        v = [0] * self.dim
        v[self.basis_labels.index(label)] = 1
        return tuple(v)


def _raw(gram, A, B) -> int:
    return sum(A[i] * gram[i][j] * B[j] for i in range(len(A)) for j in range(len(B)) if A[i] and B[j])


def _check_dim(s, *classes):
    for X in classes:
        if len(X) != s.dim:
            raise InputError(f"class of length {len(X)} on a surface of dimension {s.dim}")


def project(s: BlowupSurface, X) -> tuple:
    _check_dim(s, X)
    X = tuple(X)
    for E in s.contracted:
        t = _raw(s.gram, X, E)
        if t:
            X = tuple(x + t * e for x, e in zip(X, E))
    return X


def intersect(s: BlowupSurface, A, B) -> int:
    _check_dim(s, A, B)
    return _raw(s.gram, project(s, A), project(s, B))


def canonical_class(s: BlowupSurface) -> tuple:
    return project(s, s.canonical)


def plane() -> BlowupSurface:
    return BlowupSurface(((1,),), (-3,), ("e0",))


def hirzebruch(a: int) -> BlowupSurface:
    if a < 0:
        raise InputError("Hirzebruch index must be >= 0")
    return BlowupSurface(((-a, 1), (1, 0)), (-2, -(a + 2)), ("C0", "f"))


def blow_up(s: BlowupSurface, label: str, check=True) -> BlowupSurface:
    if label in s.basis_labels:
        raise InputError(f"label {label!r} already in use")
    n = s.dim
    gram = tuple(row + (0,) for row in s.gram) + (tuple([0] * n + [-1]),)
    out = BlowupSurface(
        gram,
        s.canonical + (1,),
        s.basis_labels + (label,),
        tuple(E + (0,) for E in s.contracted),
    )
    if check:
        check_signature(out)
    return out


def contract(s: BlowupSurface, E, check=True) -> BlowupSurface:
    _check_dim(s, E)
    self_int = intersect(s, E, E)
    k_dot = intersect(s, s.canonical, E)
    if self_int != -1 or k_dot != -1:
        raise InputError(f"class {tuple(E)} is not numerically a (-1)-curve (E^2={self_int}, K.E={k_dot})")
    out = BlowupSurface(s.gram, s.canonical, s.basis_labels, s.contracted + (project(s, E),))
    if check:
        check_signature(out)
    return out


def self_intersection(s, X) -> int:
    return intersect(s, X, X)


def canonical_square(s) -> int:
    return intersect(s, s.canonical, s.canonical)


def signature(rows) -> tuple:
    """(positive, negative, zero) inertia of a symmetric rational matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # congruence: row/col i += row/col j gives m[i][i] = 2 m[i][j] + m[j][j]
            for k in range(n):
                m[i][k] += m[j][k]
            for k in range(n):
                m[k][i] += m[k][j]
            if m[i][i] == 0:
                for k in range(n):
                    m[i][k] -= 2 * m[j][k]
                for k in range(n):
                    m[k][i] -= 2 * m[k][j]
            piv = i
        d = m[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = m[i][piv] / d
            if f:
                for k in active:
                    m[i][k] -= f * m[piv][k]
        for i in active:
            m[i][piv] = m[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def quotient_gram(s: BlowupSurface):
    images = [project(s, s.basis_vector(lab)) for lab in s.basis_labels]
    return [[_raw(s.gram, u, v) for v in images] for u in images]


def check_signature(s: BlowupSurface):
    pos, neg, _ = signature(quotient_gram(s))
    if (pos, neg) != (1, s.rank - 1):
        raise InvariantViolation(f"intersection form has signature ({pos},{neg}), expected (1,{s.rank - 1})")


def numerically_trivial(s: BlowupSurface, X) -> bool:
    return all(intersect(s, X, s.basis_vector(lab)) == 0 for lab in s.basis_labels)


@dataclass(frozen=True)
class ElmResult:
    a: int
    alpha: int
    beta: int
    new_mult: int
    surface: BlowupSurface = None


def elm_oracle(a: int, alpha: int, beta: int, on_c0: bool, mult: int) -> ElmResult:
    """Elementary transformation of the class alpha*C0 + beta*f on F_a at a
    point of multiplicity ``mult``, computed inside the lattice only.

    Blow up the point (E), contract the strict transform f - E of its fibre,
    then read the pushed-forward curve in the (C0', f') basis of the target.
    On F_0 the point is taken to lie on the C0-type curve through it, so the
    index always goes up.
    """
    if alpha < 1:
        raise InputError("alpha must be >= 1")
    if mult < 0:
        raise InputError("multiplicity must be >= 0")
    if mult > alpha:
        raise InputError(f"multiplicity {mult} > alpha = {alpha}: the fibre would lie in the curve")
    up = on_c0 or a == 0
    s = blow_up(hirzebruch(a), "E")
    curve = (alpha, beta, -mult)
    fibre_strict = (0, 1, -1)
    s = contract(s, fibre_strict)
    f_new = project(s, (0, 1, 0))
    c0_new = project(s, (1, 0, -1) if up else (1, 0, 0))
    a_new = -intersect(s, c0_new, c0_new)
    if a_new < 0:
        raise InvariantViolation(f"image section has positive self-intersection {-a_new}")
    x = intersect(s, curve, f_new)
    y = intersect(s, curve, c0_new) + a_new * x
    residual = tuple(cv - x * c0 - y * fv for cv, c0, fv in zip(curve, c0_new, f_new))
    if not numerically_trivial(s, residual):
        raise InvariantViolation("pushed-forward class is not in the span of C0' and f'")
    new_mult = _raw(s.gram, curve, fibre_strict)
    return ElmResult(a_new, x, y, new_mult, s)


def integer_span_basis(vectors) -> list:
    """A Z-basis (echelon form) of the lattice spanned by integer vectors."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    for col in range(ncols):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            live = nxt
        if live:
            basis.append(tuple(live[0]))
        rows = [r for r in rest if any(r)]
    return basis


def picard_basis(s: BlowupSurface) -> list:
    """Z-basis of the Picard lattice of the contracted surface, as projected
    classes in the original coordinates."""
    return integer_span_basis(project(s, s.basis_vector(lab)) for lab in s.basis_labels)


def rulings(s: BlowupSurface) -> list:
    """Primitive classes f with f^2 = 0 and K.f = -2 on a rank-2 surface.

    On F_a with a even this includes C0 + (a/2) f, which is not nef; callers
    pick the candidate of least intersection with a known irreducible curve.
    """
    if s.rank != 2:
        return []
    basis = picard_basis(s)
    if len(basis) != 2:
        raise InvariantViolation(f"rank-2 surface with a lattice basis of size {len(basis)}")
    u, v = basis
    a, b, c = intersect(s, u, u), intersect(s, u, v), intersect(s, v, v)
    disc = b * b - a * c
    r = isqrt(disc) if disc >= 0 else -1
    if r < 0 or r * r != disc:
        return []
    if a == 0:
        dirs = [(1, 0), (c, -2 * b)]
    else:
        dirs = [(-b + r, a), (-b - r, a)]
    out = []
    for x, y in dirs:
        g = gcd(x, y)
        if g == 0:
            continue
        x, y = x // g, y // g
        f = tuple(x * p + y * q for p, q in zip(u, v))
        k = intersect(s, s.canonical, f)
        if k == 2:
            f = tuple(-t for t in f)
            k = -2
        if k == -2 and intersect(s, f, f) == 0 and f not in out:
            out.append(f)
    return out
