"""Exact integer linear algebra.

Everything here is arbitrary-precision: matrices are tuples of row
tuples of Python ints, vectors are tuples of ints.  A matrix with
``rows`` rows and ``cols`` columns represents the homomorphism
Z^cols -> Z^rows acting on column vectors, so the column span is the
image and "relations" are always given as columns.

The workhorse is :func:`smith_normal_form`, which returns unimodular
transforms together with their inverses; kernels, integer solving,
lattice bases, saturations and cokernels are all derived from it.
Finitely generated abelian groups appear in two flavours:

* :class:`PresentedAbGroup` -- the answer format: a free rank plus a
  divisor chain of invariant factors (never storing factors of 1).
* :class:`Subquotient` -- a working presentation N/D of a subquotient
  of some Z^n, with enough data to push elements in and out.  All
  sheaf-cohomology groups and the maps between them reduce to this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

Vec = tuple[int, ...]


# ---------------------------------------------------------------------------
# vectors

def vec(xs) -> Vec:
    return tuple(int(x) for x in xs)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vneg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vscale(k: int, a: Vec) -> Vec:
    return tuple(k * x for x in a)


def dot(a: Vec, b: Vec) -> int:
    return sum(x * y for x, y in zip(a, b, strict=True))


def is_zero_vec(a: Vec) -> bool:
    return all(x == 0 for x in a)


def vec_gcd(a: Vec) -> int:
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def primitive(a: Vec) -> Vec:
    """Divide out the content; the zero vector stays zero."""
    g = vec_gcd(a)
    if g <= 1:
        return vec(a)
    return tuple(x // g for x in a)


# ---------------------------------------------------------------------------
# matrices

@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[Vec, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError("column count mismatch")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "IntMatrix":
        rows = [vec(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_cols(cls, cols, rows: int | None = None) -> "IntMatrix":
        cols = [vec(c) for c in cols]
        if rows is None:
            if not cols:
                raise ValueError("cannot infer row count of an empty matrix")
            rows = len(cols[0])
        entries = tuple(tuple(c[i] for c in cols) for i in range(rows))
        return cls(rows, len(cols), entries)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n))
                               for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def col(self, j: int) -> Vec:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vec]:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.col(j) for j in range(self.cols)))

    def matvec(self, v: Vec) -> Vec:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(dot(r, v) for r in self.entries)

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ocols = other.columns()
        entries = tuple(tuple(dot(r, c) for c in ocols) for r in self.entries)
        return IntMatrix(self.rows, other.cols, entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("dimension mismatch")
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def is_identity(self) -> bool:
        return (self.rows == self.cols
                and all(self.entries[i][j] == (1 if i == j else 0)
                        for i in range(self.rows) for j in range(self.cols)))

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix.from_rows(m)


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SmithForm:
    """U @ M @ V == D with U, V unimodular and D in Smith normal form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix
    Vinv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return self.D.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(m) -> SmithForm:
    """Diagonalize over Z by elementary row/column operations.

    Pivoting always picks a minimal-absolute-value nonzero entry, and the
    diagonal is post-processed to satisfy d1 | d2 | ... with all di >= 0.
    """
    m = _as_matrix(m)
    rows, cols = m.rows, m.cols
    D = [list(r) for r in m.entries]
    U = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    Ui = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    V = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    Vi = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_add(i, j, k):  # row_i += k * row_j
        D[i] = [a + k * b for a, b in zip(D[i], D[j])]
        U[i] = [a + k * b for a, b in zip(U[i], U[j])]
        for r in Ui:
            r[j] -= k * r[i]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        D[i] = [-a for a in D[i]]
        U[i] = [-a for a in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(j, i, k):  # col_j += k * col_i
        for r in D:
            r[j] += k * r[i]
        for r in V:
            r[j] += k * r[i]
        Vi[i] = [a - k * b for a, b in zip(Vi[i], Vi[j])]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    n = min(rows, cols)
    t = 0
    while t < n:
        # locate a minimal nonzero pivot in the trailing block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                a = D[i][j]
                if a != 0 and (best is None or abs(a) < best):
                    best = abs(a)
                    pivot = (i, j)
        if pivot is None:
            break
        i, j = pivot
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        while True:
            # clear the pivot column (Euclid with swaps)
            again = True
            while again:
                again = False
                for i in range(t + 1, rows):
                    if D[i][t] != 0:
                        q = D[i][t] // D[t][t]
                        row_add(i, t, -q)
                        if D[i][t] != 0:
                            row_swap(t, i)
                            again = True
            # clear the pivot row; a swap here dirties the column again
            col_dirty = False
            again = True
            while again:
                again = False
                for j in range(t + 1, cols):
                    if D[t][j] != 0:
                        q = D[t][j] // D[t][t]
                        col_add(j, t, -q)
                        if D[t][j] != 0:
                            col_swap(t, j)
                            again = True
                            col_dirty = True
            if col_dirty or any(D[i][t] != 0 for i in range(t + 1, rows)):
                continue
            # pivot must divide the whole trailing block, else fold the
            # offending row into row t and reduce again; |pivot| strictly
            # drops each retry, so this terminates
            viol = None
            for i in range(t + 1, rows):
                if any(D[i][j] % D[t][t] != 0 for j in range(t + 1, cols)):
                    viol = i
                    break
            if viol is None:
                break
            row_add(t, viol, 1)
        t += 1

    for i in range(n):
        if D[i][i] < 0:
            row_neg(i)

    return SmithForm(
        U=IntMatrix(rows, rows, tuple(vec(r) for r in U)),
        D=IntMatrix(rows, cols, tuple(vec(r) for r in D)),
        V=IntMatrix(cols, cols, tuple(vec(r) for r in V)),
        Uinv=IntMatrix(rows, rows, tuple(vec(r) for r in Ui)),
        Vinv=IntMatrix(cols, cols, tuple(vec(r) for r in Vi)),
    )


# ---------------------------------------------------------------------------
# derived lattice operations

@lru_cache(maxsize=8192)
def _snf(m: IntMatrix) -> SmithForm:
    return smith_normal_form(m)


def solve(m, b: Vec) -> Vec | None:
    """One integer solution x of M x = b, or None."""
    m = _as_matrix(m)
    if len(b) != m.rows:
        raise ValueError("dimension mismatch")
    if m.cols == 0:
        return () if is_zero_vec(b) else None
    s = _snf(m)
    c = s.U.matvec(b)
    y = [0] * m.cols
    diag = s.diagonal
    for i in range(m.rows):
        d = diag[i] if i < len(diag) else 0
        if d != 0:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    return s.V.matvec(tuple(y))


def kernel_basis(m) -> list[Vec]:
    """Basis of the integer kernel {x : M x = 0}; always a saturated lattice."""
    m = _as_matrix(m)
    if m.cols == 0:
        return []
    s = _snf(m)
    diag = s.diagonal
    out = []
    for j in range(m.cols):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            out.append(s.V.col(j))
    return out


def lattice_basis(vectors: list[Vec], dim: int | None = None) -> list[Vec]:
    """Basis of the sublattice of Z^dim spanned by the given vectors."""
    if not vectors:
        return []
    dim = len(vectors[0]) if dim is None else dim
    m = IntMatrix.from_cols(vectors, rows=dim)
    s = _snf(m)
    diag = s.diagonal
    out = []
    for i, d in enumerate(diag):
        if d != 0:
            out.append(vscale(d, s.Uinv.col(i)))
    return out


def saturation_basis(vectors: list[Vec], dim: int | None = None) -> list[Vec]:
    """Basis of {x : k*x in span(vectors) for some k >= 1}."""
    if not vectors:
        return []
    dim = len(vectors[0]) if dim is None else dim
    m = IntMatrix.from_cols(vectors, rows=dim)
    s = _snf(m)
    return [s.Uinv.col(i) for i, d in enumerate(s.diagonal) if d != 0]


def in_span(vectors: list[Vec], v: Vec) -> bool:
    if not vectors:
        return is_zero_vec(v)
    return solve(IntMatrix.from_cols(vectors, rows=len(v)), v) is not None


def matrix_rank(m) -> int:
    m = _as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    return _snf(m).rank


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix (U M V = I gives
    M^-1 = V U)."""
    if m.rows != m.cols:
        raise ValueError("not square")
    s = _snf(m)
    if any(d != 1 for d in s.diagonal):
        raise ValueError("matrix is not unimodular")
    return s.V.matmul(s.U)


def complete_to_basis(cols: list[Vec], dim: int) -> IntMatrix:
    """A unimodular matrix whose first len(cols) columns span the same
    lattice as ``cols``; requires the input lattice to be saturated."""
    if not cols:
        return IntMatrix.identity(dim)
    m = IntMatrix.from_cols(cols, rows=dim)
    s = _snf(m)
    if any(d not in (0, 1) for d in s.diagonal):
        raise ValueError("lattice is not saturated")
    return s.Uinv


class CosetNormalizer:
    """Canonical forms for Z^n modulo a fixed sublattice (given by columns)."""

    def __init__(self, dim: int, denominators: list[Vec]):
        self.dim = dim
        if denominators:
            self._s = _snf(IntMatrix.from_cols(denominators, rows=dim))
            self._diag = self._s.diagonal
        else:
            self._s = None
            self._diag = []

    def key(self, v: Vec) -> Vec:
        if self._s is None:
            return vec(v)
        y = self._s.U.matvec(v)
        out = []
        for i, c in enumerate(y):
            d = self._diag[i] if i < len(self._diag) else 0
            out.append(c % d if d != 0 else c)
        return tuple(out)


# ---------------------------------------------------------------------------
# abelian groups in invariant-factor form

@dataclass(frozen=True)
class PresentedAbGroup:
    """A finitely generated abelian group: Z^rank + Z/d1 + ... + Z/dk
    with 2 <= d1 | d2 | ... | dk.  This is the normal form every
    group-valued computation in the package returns."""

    rank: int
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        prev = None
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
            if prev is not None and d % prev != 0:
                raise ValueError("invariant factors must form a divisor chain")
            prev = d

    @classmethod
    def from_diagonal(cls, diagonal, ambient_rank: int) -> "PresentedAbGroup":
        nonzero = [d for d in diagonal if d != 0]
        return cls(rank=ambient_rank - len(nonzero),
                   invariant_factors=tuple(d for d in nonzero if d >= 2))

    @classmethod
    def trivial(cls) -> "PresentedAbGroup":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "PresentedAbGroup":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, n: int) -> "PresentedAbGroup":
        return cls(0, (n,)) if n >= 2 else cls(0, ()) if n == 1 else cls(1, ())

    def direct_sum(self, other: "PresentedAbGroup") -> "PresentedAbGroup":
        factors = list(self.invariant_factors) + list(other.invariant_factors)
        if not factors:
            return PresentedAbGroup(self.rank + other.rank, ())
        diag = IntMatrix.from_rows(
            [[factors[i] if i == j else 0 for j in range(len(factors))]
             for i in range(len(factors))])
        s = smith_normal_form(diag)
        return PresentedAbGroup(
            self.rank + other.rank,
            tuple(d for d in s.diagonal if d >= 2))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self) -> int | None:
        if self.rank:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"


def cokernel(m) -> PresentedAbGroup:
    """Cokernel of Z^cols -> Z^rows (columns are the relations)."""
    m = _as_matrix(m)
    if m.cols == 0 or m.rows == 0:
        return PresentedAbGroup(m.rows, ())
    s = _snf(m)
    return PresentedAbGroup.from_diagonal(s.diagonal, m.rows)


# ---------------------------------------------------------------------------
# subquotients N/D of Z^n, with maps

class Subquotient:
    """N/D for sublattices D <= N <= Z^dim.

    ``numerator`` is a list of vectors spanning N (None means all of Z^dim),
    ``denominator`` a list of vectors spanning D; D must lie in N.
    Elements are addressed either as ambient vectors (which must lie in N)
    or as coordinate vectors over the computed basis of N.
    """

    def __init__(self, dim: int, numerator: list[Vec] | None,
                 denominator: list[Vec]):
        self.dim = dim
        if numerator is None:
            self.basis = [tuple(1 if i == j else 0 for j in range(dim))
                          for i in range(dim)]
            self._basis_mat = IntMatrix.identity(dim) if dim else IntMatrix(0, 0, ())
            self._identity_basis = True
        else:
            self.basis = lattice_basis(list(numerator), dim)
            self._basis_mat = (IntMatrix.from_cols(self.basis, rows=dim)
                               if self.basis else IntMatrix(dim, 0, tuple(() for _ in range(dim))))
            self._identity_basis = False
        self.rel_coords: list[Vec] = []
        for d in denominator:
            c = self.coords(d)
            if c is None:
                raise ValueError("denominator vector outside the numerator lattice")
            self.rel_coords.append(c)
        self._group: PresentedAbGroup | None = None
        self._coset = CosetNormalizer(len(self.basis), self.rel_coords)

    @property
    def ngens(self) -> int:
        return len(self.basis)

    def coords(self, v: Vec) -> Vec | None:
        """Coordinates of an ambient vector over the numerator basis."""
        if len(v) != self.dim:
            raise ValueError("dimension mismatch")
        if self._identity_basis:
            return vec(v)
        if not self.basis:
            return () if is_zero_vec(v) else None
        return solve(self._basis_mat, v)

    def from_coords(self, c: Vec) -> Vec:
        return self._basis_mat.matvec(c) if self.basis else (0,) * self.dim

    def group(self) -> PresentedAbGroup:
        if self._group is None:
            if not self.basis:
                self._group = PresentedAbGroup.trivial()
            elif not self.rel_coords:
                self._group = PresentedAbGroup(len(self.basis), ())
            else:
                self._group = cokernel(
                    IntMatrix.from_cols(self.rel_coords, rows=len(self.basis)))
        return self._group

    def is_zero(self, coords: Vec) -> bool:
        """Does a coordinate vector represent 0 in N/D?"""
        if not self.basis:
            return True
        return all(c == 0 for c in self._coset.key(coords))

    def same_class(self, a: Vec, b: Vec) -> bool:
        return self.is_zero(vsub(a, b))

    def class_key(self, coords: Vec) -> Vec:
        return self._coset.key(coords)


class Hom:
    """A homomorphism between subquotients, given by a carrier matrix on
    the ambient spaces.  The carrier must map numerator into numerator
    and denominator into denominator (checked)."""

    def __init__(self, src: Subquotient, dst: Subquotient, carrier: IntMatrix):
        if carrier.rows != dst.dim or carrier.cols != src.dim:
            raise ValueError("carrier has the wrong shape")
        self.src = src
        self.dst = dst
        self.carrier = carrier
        self.matrix: list[Vec] = []  # dst-coords image of each src basis vector
        for b in src.basis:
            c = dst.coords(carrier.matvec(b))
            if c is None:
                raise ValueError("carrier does not map numerator into numerator")
            self.matrix.append(c)
        for r in src.rel_coords:
            img = self.apply_coords(r)
            if not dst.is_zero(img):
                raise ValueError("carrier does not map denominator into denominator")

    @classmethod
    def from_images(cls, src: Subquotient, dst: Subquotient,
                    images: list[Vec]) -> "Hom":
        """A hom given directly by the dst coordinates of each src basis
        vector, with no ambient carrier matrix."""
        h = cls.__new__(cls)
        h.src = src
        h.dst = dst
        h.carrier = None
        if len(images) != src.ngens:
            raise ValueError("need one image per source basis vector")
        h.matrix = []
        for c in images:
            if len(c) != dst.ngens:
                raise ValueError("image has the wrong length")
            h.matrix.append(tuple(c))
        for r in src.rel_coords:
            if not dst.is_zero(h.apply_coords(r)):
                raise ValueError("images do not kill the source relations")
        return h

    def apply_coords(self, c: Vec) -> Vec:
        if not self.dst.basis:
            return ()
        out = (0,) * self.dst.ngens
        for k, col in zip(c, self.matrix, strict=True):
            if k:
                out = vadd(out, vscale(k, col))
        return out

    def apply_ambient(self, v: Vec) -> Vec:
        c = self.src.coords(v)
        if c is None:
            raise ValueError("vector outside the source numerator")
        return self.apply_coords(c)

    # -- derived structure ---------------------------------------------

    def kernel_gens(self) -> list[Vec]:
        """Generators (src coordinates) of ker, as a subgroup of src."""
        n = self.src.ngens
        if n == 0:
            return []
        cols = [self.matrix[i] for i in range(n)] + self.dst.rel_coords
        m = (IntMatrix.from_cols(cols, rows=self.dst.ngens)
             if self.dst.ngens else IntMatrix(0, len(cols), ()))
        ker = kernel_basis(m) if m.rows else \
            [tuple(1 if i == j else 0 for j in range(len(cols))) for i in range(len(cols))]
        gens = [k[:n] for k in ker]
        return [g for g in gens if not is_zero_vec(g)] or []

    def kernel_group(self) -> PresentedAbGroup:
        gens = self.kernel_gens()
        sq = Subquotient(self.src.ngens, gens, _filter_into(gens, self.src.rel_coords, self.src.ngens))
        return sq.group()

    def cokernel_group(self) -> PresentedAbGroup:
        if self.dst.ngens == 0:
            return PresentedAbGroup.trivial()
        cols = list(self.matrix) + self.dst.rel_coords
        if not cols:
            return PresentedAbGroup(self.dst.ngens, ())
        return cokernel(IntMatrix.from_cols(cols, rows=self.dst.ngens))

    def is_injective(self) -> bool:
        return all(self.src.is_zero(g) for g in self.kernel_gens())

    def is_surjective(self) -> bool:
        return self.cokernel_group().is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def image_contains(self, coords: Vec) -> bool:
        """Is a dst-coordinate vector in im + D_dst?"""
        cols = list(self.matrix) + self.dst.rel_coords
        return in_span(cols, coords)


def _filter_into(numerator: list[Vec], candidates: list[Vec], dim: int) -> list[Vec]:
    """The candidates that lie in the span of the numerator (used to
    restrict relations to a subgroup)."""
    out = []
    for c in candidates:
        if in_span(numerator, c) if numerator else is_zero_vec(c):
            out.append(c)
    return out


def compose(f: Hom, g: Hom) -> Hom:
    """g after f."""
    if f.dst is not g.src and f.dst.dim != g.src.dim:
        raise ValueError("cannot compose")
    if f.carrier is not None and g.carrier is not None:
        return Hom(f.src, g.dst, g.carrier.matmul(f.carrier))
    return Hom.from_images(f.src, g.dst,
                           [g.apply_coords(col) for col in f.matrix])


def exact_at(f: Hom, g: Hom) -> bool:
    """Is src(g) exact at the middle of f: A -> B, g: B -> C?"""
    mid = g.src
    # im(f) <= ker(g)
    for col in f.matrix:
        img = g.apply_coords(col)
        if not g.dst.is_zero(img):
            return False
    # ker(g) <= im(f) + D_mid
    cols = list(f.matrix) + mid.rel_coords
    for k in g.kernel_gens():
        if not (in_span(cols, k) if cols else is_zero_vec(k)):
            return False
    return True
