"""Exact linear algebra over the integers and finitely generated abelian groups.

Everything in this package ultimately reduces to integer matrix normal forms.
This module provides:

* Smith normal form with unimodular transform witnesses ``D = U * M * V``.
* A column-style Hermite form used as the canonical basis of a sublattice.
* ``FPAbGroup`` -- a finitely generated abelian group in canonical invariant
  factor form (free part first, then torsion in divisibility order).
* ``Subgroup`` -- a subgroup of an ``FPAbGroup`` stored as the canonical
  Hermite basis of its preimage lattice, so equality of subgroups is a
  tuple comparison.
* ``Hom`` -- a homomorphism given by an integer matrix on canonical
  generators, with well-definedness checked at construction.
* Derived constructions: kernels, images, cokernels, preimages, subquotients
  with sections, induced maps, and the lattice algebra of subgroups.

All arithmetic uses Python's arbitrary precision integers; no floating point
is involved anywhere.

>>> G = FPAbGroup(rank=1, torsion=(6,))
>>> G.ngens
2
>>> G.reduce((3, 14))
(3, 2)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Sequence

Vector = tuple  # tuple of ints
Matrix = list  # list of rows, each a list of ints


class AmbientMismatch(Exception):
    """Raised when an operation mixes subgroups of different ambient groups."""


class ContainmentViolation(Exception):
    """Raised when a required subgroup containment fails; carries a witness."""


class NotWellDefined(Exception):
    """Raised when a map fails to descend to a quotient; carries a witness."""


# ---------------------------------------------------------------------------
# plain integer matrix helpers
# ---------------------------------------------------------------------------


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    if A and B and len(A[0]) != len(B):
        raise ValueError("matrix dimension mismatch")
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [
        [sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)]
        for row in A
    ]


def mat_vec(A: Matrix, v: Sequence[int]) -> Vector:
    if A and len(A[0]) != len(v):
        raise ValueError("matrix/vector dimension mismatch")
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in A)


def transpose(A: Matrix) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def columns_of(A: Matrix) -> list:
    """Columns of ``A`` as a list of tuples (empty matrix has no columns)."""
    if not A:
        return []
    return [tuple(row[j] for row in A) for j in range(len(A[0]))]


def matrix_from_columns(cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
    return [[col[i] for col in cols] for i in range(nrows)]


def _xgcd(a: int, b: int):
    """Extended gcd: returns (g, s, t) with s*a + t*b == g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def smith_normal_form(M: Matrix):
    """Smith normal form with transform witnesses.

    Args:
        M: Integer matrix with ``r`` rows and ``c`` columns.

    Returns:
        Tuple ``(U, D, V)`` of integer matrices with ``D = U * M * V``,
        ``U`` and ``V`` unimodular, and ``D`` diagonal with nonnegative
        entries satisfying ``D[0][0] | D[1][1] | ...``.
    """
    U, D, V, _, _ = _snf_with_inverses(M)
    return U, D, V


def _snf_with_inverses(M: Matrix):
    """Smith normal form that also tracks the inverse transforms.

    Returns ``(U, D, V, Uinv, Vinv)`` with ``D = U M V`` and
    ``Uinv U = I``, ``V Vinv = I``.
    """
    rows = len(M)
    cols = len(M[0]) if M else 0
    D = [list(row) for row in M]
    U = identity_matrix(rows)
    Uinv = identity_matrix(rows)
    V = identity_matrix(cols)
    Vinv = identity_matrix(cols)

    def row_combine(i1, i2, s, t, u, v):
        # rows (i1, i2) of D and U <- 2x2 transform; inverse column op on Uinv.
        for A in (D, U):
            r1, r2 = A[i1], A[i2]
            for j in range(len(r1)):
                a, b = r1[j], r2[j]
                r1[j] = s * a + t * b
                r2[j] = u * a + v * b
        # [[s,t],[u,v]] has det +-1; inverse is det * [[v,-t],[-u,s]].
        det = s * v - t * u
        for r in Uinv:
            a, b = r[i1], r[i2]
            r[i1] = det * (v * a - u * b)
            r[i2] = det * (-t * a + s * b)

    def col_combine(j1, j2, s, t, u, v):
        for A in (D, V):
            for r in A:
                a, b = r[j1], r[j2]
                r[j1] = s * a + t * b
                r[j2] = u * a + v * b
        det = s * v - t * u
        r1, r2 = Vinv[j1], Vinv[j2]
        for j in range(len(r1)):
            a, b = r1[j], r2[j]
            r1[j] = det * (v * a - u * b)
            r2[j] = det * (-t * a + s * b)

    n = min(rows, cols)
    for k in range(n):
        # Find a nonzero pivot in the remaining block.
        pr = pc = -1
        for i in range(k, rows):
            for j in range(k, cols):
                if D[i][j] != 0:
                    pr, pc = i, j
                    break
            if pr >= 0:
                break
        if pr < 0:
            break
        if pr != k:
            row_combine(k, pr, 0, 1, 1, 0)
        if pc != k:
            col_combine(k, pc, 0, 1, 1, 0)
        while True:
            # Clear column k below the pivot.  When the pivot already divides
            # the entry a plain row subtraction suffices (and never disturbs
            # the pivot row); otherwise a gcd combine shrinks the pivot.
            for i in range(k + 1, rows):
                a, b = D[k][k], D[i][k]
                if b == 0:
                    continue
                if a != 0 and b % a == 0:
                    row_combine(k, i, 1, 0, -(b // a), 1)
                else:
                    g, s, t = _xgcd(a, b)
                    row_combine(k, i, s, t, -(b // g), a // g)
            # Clear row k to the right of the pivot.
            dirty = False
            for j in range(k + 1, cols):
                a, b = D[k][k], D[k][j]
                if b == 0:
                    continue
                if a != 0 and b % a == 0:
                    col_combine(k, j, 1, 0, -(b // a), 1)
                else:
                    g, s, t = _xgcd(a, b)
                    col_combine(k, j, s, t, -(b // g), a // g)
                    dirty = True
            if not dirty and all(D[i][k] == 0 for i in range(k + 1, rows)):
                break
        if D[k][k] < 0:
            for j in range(cols):
                D[k][j] = -D[k][j]
            for j in range(len(U[k])):
                U[k][j] = -U[k][j]
            for r in Uinv:
                r[k] = -r[k]

    # Enforce the divisibility chain d_k | d_{k+1}.
    changed = True
    while changed:
        changed = False
        for k in range(n - 1):
            a, b = D[k][k], D[k + 1][k + 1]
            if b % a if a else b:
                # Fold d_{k+1} into position k and re-diagonalize the 2x2 block.
                col_combine(k, k + 1, 1, 1, 0, 1)
                g, s, t = _xgcd(D[k][k], D[k + 1][k])
                row_combine(k, k + 1, s, t, -(D[k + 1][k] // g), D[k][k] // g)
                col_combine(k, k + 1, 1, 0, -(D[k][k + 1] // D[k][k]), 1)
                if D[k + 1][k + 1] < 0:
                    for j in range(cols):
                        D[k + 1][j] = -D[k + 1][j]
                    for j in range(len(U[k + 1])):
                        U[k + 1][j] = -U[k + 1][j]
                    for r in Uinv:
                        r[k + 1] = -r[k + 1]
                changed = True
    return U, D, V, Uinv, Vinv


def hermite_column_form(cols: Sequence[Sequence[int]], nrows: int) -> tuple:
    """Canonical column-style Hermite basis of the lattice spanned by ``cols``.

    The result is a tuple of column tuples, one per lattice basis vector.
    Pivot rows strictly increase from left to right, pivots are positive,
    entries above a pivot vanish, and entries to the left of a pivot in its
    row are reduced into ``[0, pivot)``.  Two generating sets span the same
    lattice iff they produce equal output here.
    """
    work = [list(c) for c in cols if any(c)]
    kept: list = []
    for row in range(nrows):
        # Merge all remaining columns with a nonzero entry in this row.
        live = [c for c in work if c[row] != 0]
        rest = [c for c in work if c[row] == 0]
        if not live:
            work = rest
            continue
        piv = live[0]
        for other in live[1:]:
            g, s, t = _xgcd(piv[row], other[row])
            a, b = piv[row] // g, other[row] // g
            piv, other = (
                [s * x + t * y for x, y in zip(piv, other)],
                [-b * x + a * y for x, y in zip(piv, other)],
            )
            if any(other):
                rest.append(other)
        if piv[row] < 0:
            piv = [-x for x in piv]
        # Reduce earlier pivots' entries in this row into [0, piv[row]).
        for c in kept:
            q = c[row] // piv[row]
            if q:
                for i in range(nrows):
                    c[i] -= q * piv[i]
        kept.append(piv)
        work = rest
    return tuple(tuple(c) for c in kept)


def kernel_basis(M: Matrix) -> list:
    """Basis (list of column tuples) for the integer kernel of ``M``."""
    rows = len(M)
    cols = len(M[0]) if M else 0
    if cols == 0:
        return []
    if rows == 0:
        return columns_of(identity_matrix(cols))
    _, D, V = smith_normal_form(M)
    n = min(rows, cols)
    basis = []
    for j in range(cols):
        if j >= n or D[j][j] == 0:
            basis.append(tuple(V[i][j] for i in range(cols)))
    return basis


def solve_matrix(M: Matrix, y: Sequence[int]) -> Optional[Vector]:
    """One integer solution ``x`` of ``M x = y``, or ``None`` if there is none."""
    rows = len(M)
    cols = len(M[0]) if M else 0
    if rows != len(y):
        raise ValueError("dimension mismatch in solve")
    if cols == 0:
        return () if all(v == 0 for v in y) else None
    U, D, V = smith_normal_form(M)
    w = mat_vec(U, y)
    z = [0] * cols
    n = min(rows, cols)
    for i in range(rows):
        d = D[i][i] if i < n else 0
        if d == 0:
            if w[i] != 0:
                return None
        else:
            if w[i] % d != 0:
                return None
            z[i] = w[i] // d
    return mat_vec(V, z)


# ---------------------------------------------------------------------------
# finitely generated abelian groups in canonical form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FPAbGroup:
    """A finitely generated abelian group in canonical invariant factor form.

    ``rank`` free generators come first, followed by one generator of order
    ``d`` for each ``d`` in ``torsion``; the torsion entries are all >= 2 and
    satisfy ``torsion[i] | torsion[i+1]``.  Two groups are isomorphic iff they
    are equal as dataclasses.

    Elements are integer tuples of length ``ngens``; ``reduce`` normalizes the
    torsion coordinates.
    """

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def orders(self) -> tuple:
        """Per-generator order: 0 for free generators, d for torsion ones."""
        return (0,) * self.rank + self.torsion

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def order(self) -> Optional[int]:
        """Number of elements, or ``None`` if the group is infinite."""
        if self.rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def reduce(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ngens:
            raise ValueError("element has wrong length for group")
        return tuple(
            x % d if d else x for x, d in zip(v, self.orders)
        )

    def add(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        return self.reduce(tuple(a + b for a, b in zip(u, v)))

    def neg(self, v: Sequence[int]) -> Vector:
        return self.reduce(tuple(-a for a in v))

    def relation_columns(self) -> list:
        """Columns spanning the relation lattice: ``d_i * e_i`` per torsion gen."""
        n = self.ngens
        cols = []
        for i, d in enumerate(self.torsion):
            col = [0] * n
            col[self.rank + i] = d
            cols.append(tuple(col))
        return cols

    def elements(self) -> Iterator[Vector]:
        """Iterate over all elements (finite groups only)."""
        if self.rank:
            raise ValueError("cannot enumerate an infinite group")
        yield from itertools.product(*(range(d) for d in self.torsion))

    def describe(self) -> str:
        """Human-readable invariant factor decomposition, e.g. ``Z^2 (+) Z/6``."""
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append("Z^%d" % self.rank)
        parts.extend("Z/%d" % d for d in self.torsion)
        return " (+) ".join(parts) if parts else "0"


def group_from_presentation(ngens: int, relation_cols: Sequence[Sequence[int]]):
    """Canonicalize ``Z^ngens`` modulo the lattice spanned by ``relation_cols``.

    Returns:
        Tuple ``(G, proj, sect)`` where ``G`` is the quotient in canonical
        form, ``proj`` is a matrix sending old coordinates to canonical
        generators and ``sect`` lifts canonical generators back to old
        coordinates, so that ``proj * sect = id`` modulo the relations of
        ``G``.
    """
    R = matrix_from_columns(list(relation_cols), ngens)
    if not relation_cols:
        R = zero_matrix(ngens, 0)
    U, D, _, Uinv, _ = _snf_with_inverses(R)
    ncols = len(relation_cols)
    n = min(ngens, ncols)
    free_idx = []
    torsion_idx = []  # (d, old index)
    for i in range(ngens):
        d = D[i][i] if i < n else 0
        if d == 0:
            free_idx.append(i)
        elif d >= 2:
            torsion_idx.append((d, i))
    # d == 1 rows contribute nothing.  SNF already ordered the torsion by
    # divisibility; free generators come first in the canonical order.
    order = free_idx + [i for _, i in torsion_idx]
    G = FPAbGroup(rank=len(free_idx), torsion=tuple(d for d, _ in torsion_idx))
    proj = [U[i] for i in order]
    sect = [[Uinv[i][j] for j in order] for i in range(ngens)]
    return G, proj, sect


def direct_sum(groups: Sequence[FPAbGroup]):
    """Direct sum in canonical form with inclusion and projection maps.

    Returns ``(G, inclusions, projections)``; the summands' generators are
    concatenated and then re-canonicalized, so the maps are genuine ``Hom``s.
    """
    total = sum(g.ngens for g in groups)
    rel = []
    offset = 0
    for g in groups:
        for col in g.relation_columns():
            rel.append((0,) * offset + col + (0,) * (total - offset - g.ngens))
        offset += g.ngens
    G, proj, sect = group_from_presentation(total, rel)
    inclusions = []
    projections = []
    offset = 0
    for g in groups:
        inc = [[proj[i][offset + j] for j in range(g.ngens)] for i in range(G.ngens)]
        prj = [[sect[offset + i][j] for j in range(G.ngens)] for i in range(g.ngens)]
        inclusions.append(Hom(g, G, inc))
        projections.append(Hom(G, g, prj))
        offset += g.ngens
    return G, inclusions, projections


# ---------------------------------------------------------------------------
# subgroups as canonical lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of an ``FPAbGroup`` in canonical form.

    The subgroup is stored as the Hermite basis of its full preimage lattice
    in ``Z^ngens`` (which always contains the ambient relation lattice), so
    two subgroups of the same ambient group are equal iff their ``basis``
    tuples are equal.
    """

    ambient: FPAbGroup
    basis: tuple  # tuple of column tuples, canonical Hermite form

    @staticmethod
    def from_generators(ambient: FPAbGroup, gens: Sequence[Sequence[int]]) -> "Subgroup":
        cols = [tuple(g) for g in gens]
        for c in cols:
            if len(c) != ambient.ngens:
                raise ValueError("generator has wrong length for ambient group")
        cols.extend(ambient.relation_columns())
        return Subgroup(ambient, hermite_column_form(cols, ambient.ngens))

    @staticmethod
    def zero(ambient: FPAbGroup) -> "Subgroup":
        return Subgroup.from_generators(ambient, [])

    @staticmethod
    def full(ambient: FPAbGroup) -> "Subgroup":
        n = ambient.ngens
        return Subgroup.from_generators(ambient, columns_of(identity_matrix(n)))

    def _matrix(self) -> Matrix:
        return matrix_from_columns(list(self.basis), self.ambient.ngens)

    def contains(self, v: Sequence[int]) -> bool:
        return solve_matrix(self._matrix(), tuple(v)) is not None

    def contains_subgroup(self, other: "Subgroup") -> bool:
        if other.ambient != self.ambient:
            raise AmbientMismatch("subgroups live in different ambient groups")
        return all(self.contains(c) for c in other.basis)

    def is_zero(self) -> bool:
        return self == Subgroup.zero(self.ambient)

    def sum(self, other: "Subgroup") -> "Subgroup":
        if other.ambient != self.ambient:
            raise AmbientMismatch("subgroups live in different ambient groups")
        return Subgroup(
            self.ambient,
            hermite_column_form(self.basis + other.basis, self.ambient.ngens),
        )

    def intersection(self, other: "Subgroup") -> "Subgroup":
        if other.ambient != self.ambient:
            raise AmbientMismatch("subgroups live in different ambient groups")
        n = self.ambient.ngens
        A = self._matrix()
        B = other._matrix()
        # x in L1 /\ L2  <=>  x = A s = B t; read solutions off ker [A | -B].
        stacked = [A[i] + [-x for x in B[i]] for i in range(n)]
        gens = [mat_vec(A, k[: len(self.basis)]) for k in kernel_basis(stacked)]
        return Subgroup(self.ambient, hermite_column_form(gens, n))

    def as_group(self):
        """The subgroup as an abstract group with its inclusion map.

        Returns:
            ``(S, incl)`` with ``S`` canonical and ``incl: S -> ambient``.
        """
        n = self.ambient.ngens
        basis_m = self._matrix()
        rel_coords = []
        for rc in self.ambient.relation_columns():
            x = solve_matrix(basis_m, rc)
            assert x is not None  # relation lattice is inside every subgroup
            rel_coords.append(x)
        S, _, sect = group_from_presentation(len(self.basis), rel_coords)
        incl_cols = [
            self.ambient.reduce(mat_vec(basis_m, tuple(sect[i][j] for i in range(len(self.basis)))))
            for j in range(S.ngens)
        ]
        return S, Hom(S, self.ambient, matrix_from_columns(incl_cols, n))

    def group(self) -> FPAbGroup:
        return self.as_group()[0]


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------


class Hom:
    """A homomorphism of canonical groups given by an integer matrix.

    The matrix has one column per domain generator, written in codomain
    coordinates.  Construction verifies that every domain relation maps into
    the codomain relation lattice and raises ``NotWellDefined`` otherwise.
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: FPAbGroup, codomain: FPAbGroup, matrix: Matrix):
        if len(matrix) != codomain.ngens or (
            matrix and any(len(r) != domain.ngens for r in matrix)
        ):
            if not (codomain.ngens == 0 and not matrix):
                raise ValueError("matrix shape does not match domain/codomain")
        self.domain = domain
        self.codomain = codomain
        m = [list(r) for r in matrix]
        if codomain.ngens == 0:
            m = []
        # Reduce columns so equal homs have equal matrices.
        cols = []
        for j in range(domain.ngens):
            col = codomain.reduce(tuple(m[i][j] for i in range(codomain.ngens)))
            cols.append(col)
        self.matrix = tuple(
            tuple(cols[j][i] for j in range(domain.ngens))
            for i in range(codomain.ngens)
        )
        for i, d in enumerate(domain.torsion):
            gen = domain.rank + i
            img = tuple(d * self.matrix[r][gen] for r in range(codomain.ngens))
            if codomain.reduce(img) != codomain.zero():
                raise NotWellDefined(
                    "generator %d of order %d maps to an element of larger order" % (gen, d)
                )

    def __call__(self, v: Sequence[int]) -> Vector:
        v = self.domain.reduce(v)
        return self.codomain.reduce(mat_vec([list(r) for r in self.matrix], v))

    def __eq__(self, other):
        return (
            isinstance(other, Hom)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, self.matrix))

    def __repr__(self):
        return "Hom(%s -> %s, %r)" % (
            self.domain.describe(),
            self.codomain.describe(),
            self.matrix,
        )

    @staticmethod
    def identity(G: FPAbGroup) -> "Hom":
        return Hom(G, G, identity_matrix(G.ngens))

    @staticmethod
    def zero_map(domain: FPAbGroup, codomain: FPAbGroup) -> "Hom":
        return Hom(domain, codomain, zero_matrix(codomain.ngens, domain.ngens))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.matrix for x in row)

    def compose(self, first: "Hom") -> "Hom":
        """``self`` after ``first`` (i.e. ``self o first``)."""
        if first.codomain != self.domain:
            raise ValueError("homs do not compose")
        rows, inner, cols = self.codomain.ngens, self.domain.ngens, first.domain.ngens
        m = [
            [
                sum(self.matrix[i][k] * first.matrix[k][j] for k in range(inner))
                for j in range(cols)
            ]
            for i in range(rows)
        ]
        return Hom(first.domain, self.codomain, m)

    def add(self, other: "Hom") -> "Hom":
        if other.domain != self.domain or other.codomain != self.codomain:
            raise ValueError("homs with different endpoints cannot be added")
        return Hom(
            self.domain,
            self.codomain,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.matrix, other.matrix)
            ],
        )

    def negate(self) -> "Hom":
        return Hom(self.domain, self.codomain, [[-a for a in r] for r in self.matrix])

    # -- kernel / image / preimage ------------------------------------------

    def image(self) -> Subgroup:
        return Subgroup.from_generators(self.codomain, columns_of([list(r) for r in self.matrix]))

    def kernel(self) -> Subgroup:
        return self.preimage(Subgroup.zero(self.codomain))

    def preimage(self, S: Subgroup) -> Subgroup:
        """Full preimage of a subgroup of the codomain."""
        if S.ambient != self.codomain:
            raise AmbientMismatch("subgroup is not inside the codomain")
        n_dom = self.domain.ngens
        if self.codomain.ngens == 0:
            return Subgroup.full(self.domain)
        M = [list(r) for r in self.matrix]
        B = matrix_from_columns(list(S.basis), self.codomain.ngens)
        stacked = [M[i] + [-x for x in B[i]] for i in range(self.codomain.ngens)]
        gens = [k[:n_dom] for k in kernel_basis(stacked)]
        return Subgroup.from_generators(self.domain, gens)

    def solve_element(self, y: Sequence[int]) -> Optional[Vector]:
        """One preimage of ``y`` under the map, or ``None`` if ``y`` is absent."""
        y = self.codomain.reduce(y)
        n_dom = self.domain.ngens
        if self.codomain.ngens == 0:
            return self.domain.zero()
        M = [list(r) for r in self.matrix]
        rel = matrix_from_columns(
            self.codomain.relation_columns(), self.codomain.ngens
        )
        aug = [M[i] + rel[i] for i in range(self.codomain.ngens)]
        x = solve_matrix(aug, y)
        if x is None:
            return None
        return self.domain.reduce(x[:n_dom])

    def image_of_subgroup(self, S: Subgroup) -> Subgroup:
        if S.ambient != self.domain:
            raise AmbientMismatch("subgroup is not inside the domain")
        return Subgroup.from_generators(
            self.codomain, [self(c) for c in S.basis]
        )

    def is_mono(self) -> bool:
        return self.kernel() == Subgroup.zero(self.domain)

    def is_epi(self) -> bool:
        return self.image() == Subgroup.full(self.codomain)

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def restrict(self, S: Subgroup, T: Subgroup) -> "Hom":
        """Restriction ``S -> T`` of the map, as abstract groups.

        Raises ``ContainmentViolation`` if some generator of ``S`` does not
        land in ``T``.
        """
        SG, Sincl = S.as_group()
        TG, Tincl = T.as_group()
        Tm = matrix_from_columns(list(T.basis), self.codomain.ngens)
        # Solve through the basis of T; T.as_group's generators are themselves
        # basis combinations, so go via basis coordinates.
        cols = []
        for j in range(SG.ngens):
            s_amb = Sincl(tuple(1 if i == j else 0 for i in range(SG.ngens)))
            y = self(s_amb)
            if not T.contains(y):
                raise ContainmentViolation((s_amb, y))
            cols.append(_express_in_subgroup(T, TG, Tincl, y))
        return Hom(SG, TG, matrix_from_columns(cols, TG.ngens))


def _express_in_subgroup(S: Subgroup, SG: FPAbGroup, incl: Hom, y) -> Vector:
    """Coordinates of ambient element ``y`` in terms of ``S.as_group()``."""
    x = incl.solve_element(y)
    if x is None:
        raise ContainmentViolation(y)
    return x


# ---------------------------------------------------------------------------
# quotients and subquotients
# ---------------------------------------------------------------------------


class SubquotientData:
    """The quotient ``Z / B`` of nested subgroups of an ambient group.

    Carries the canonical group together with a projection (defined on
    elements of ``Z``) and a section mapping canonical generators back to
    ambient representatives.
    """

    __slots__ = ("Z", "B", "group", "_zbasis", "_proj", "_sect")

    def __init__(self, Z: Subgroup, B: Subgroup):
        if Z.ambient != B.ambient:
            raise AmbientMismatch("subquotient pieces in different ambient groups")
        if not Z.contains_subgroup(B):
            bad = next(c for c in B.basis if not Z.contains(c))
            raise ContainmentViolation(bad)
        self.Z = Z
        self.B = B
        n = Z.ambient.ngens
        zb = matrix_from_columns(list(Z.basis), n)
        rel = []
        for c in B.basis:
            x = solve_matrix(zb, c)
            assert x is not None
            rel.append(x)
        G, proj, sect = group_from_presentation(len(Z.basis), rel)
        self.group = G
        self._zbasis = zb
        self._proj = proj
        self._sect = sect

    def project(self, v: Sequence[int]) -> Vector:
        """Class of an element of ``Z`` in the quotient."""
        x = solve_matrix(self._zbasis, tuple(v))
        if x is None:
            raise ContainmentViolation(tuple(v))
        return self.group.reduce(mat_vec(self._proj, x))

    def lift(self, q: Sequence[int]) -> Vector:
        """An ambient representative of a quotient element."""
        q = self.group.reduce(q)
        x = mat_vec(self._sect, q)
        return self.Z.ambient.reduce(mat_vec(self._zbasis, x))

    def section_columns(self) -> list:
        """Ambient representatives of the canonical quotient generators."""
        return [
            self.lift(tuple(1 if i == j else 0 for i in range(self.group.ngens)))
            for j in range(self.group.ngens)
        ]

    def projection_from(self, incl_domain: Subgroup) -> Hom:
        """The projection as a ``Hom`` from ``Z.as_group()``."""
        SG, Sincl = incl_domain.as_group()
        cols = [
            self.project(Sincl(tuple(1 if i == j else 0 for i in range(SG.ngens))))
            for j in range(SG.ngens)
        ]
        return Hom(SG, self.group, matrix_from_columns(cols, self.group.ngens))


def subquotient(Z: Subgroup, B: Subgroup) -> SubquotientData:
    return SubquotientData(Z, B)


def quotient_group(G: FPAbGroup, B: Subgroup):
    """``G / B`` with its projection hom.

    Returns:
        ``(Q, proj)`` where ``proj: G -> Q`` is surjective with kernel ``B``.
    """
    if B.ambient != G:
        raise AmbientMismatch("subgroup is not inside the group")
    sq = SubquotientData(Subgroup.full(G), B)
    cols = [
        sq.project(tuple(1 if i == j else 0 for i in range(G.ngens)))
        for j in range(G.ngens)
    ]
    return sq.group, Hom(G, sq.group, matrix_from_columns(cols, sq.group.ngens))


def cokernel(f: Hom):
    """Cokernel of ``f`` with the projection from the codomain."""
    return quotient_group(f.codomain, f.image())


def hom_kit(f: Hom) -> dict:
    """Kernel, image and cokernel of a hom in one package."""
    Q, proj = cokernel(f)
    return {
        "kernel": f.kernel(),
        "image": f.image(),
        "cokernel": Q,
        "cokernel_projection": proj,
    }


def induced_map(f: Hom, source: SubquotientData, target: SubquotientData) -> Hom:
    """The map ``source.group -> target.group`` induced by ``f``.

    Requires ``f(Z_source) <= Z_target`` and ``f(B_source) <= B_target``;
    raises ``NotWellDefined`` with a witness element otherwise.
    """
    if source.Z.ambient != f.domain or target.Z.ambient != f.codomain:
        raise AmbientMismatch("induced map endpoints do not match the hom")
    for c in source.Z.basis:
        if not target.Z.contains(f(c)):
            raise NotWellDefined((c, f(c)))
    for c in source.B.basis:
        if not target.B.contains(f(c)):
            raise NotWellDefined((c, f(c)))
    cols = [
        target.project(f(source.lift(tuple(1 if i == j else 0 for i in range(source.group.ngens)))))
        for j in range(source.group.ngens)
    ]
    return Hom(source.group, target.group, matrix_from_columns(cols, target.group.ngens))


def hom_on_generators(domain: FPAbGroup, codomain: FPAbGroup, images: Sequence[Sequence[int]]) -> Hom:
    """Hom sending the j-th canonical generator to ``images[j]``."""
    return Hom(domain, codomain, matrix_from_columns([tuple(v) for v in images], codomain.ngens))
