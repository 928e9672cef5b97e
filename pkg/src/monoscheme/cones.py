"""Rational polyhedral cones with exact integer arithmetic.

A cone is stored redundantly on both sides of duality:

* ``rays`` -- the extreme rays modulo lineality, primitive,
* ``lineality_basis`` -- saturated basis of the largest linear subspace,
* ``facet_normals`` -- extreme rays of the dual cone modulo its lineality,
* ``span_equations`` -- saturated basis of the annihilator of the span.

Membership is decided by the constraint side (every normal nonnegative,
every span equation zero), so it is exact.  Conversion between the two
sides uses an incremental double description: each new halfspace either
pivots a lineality vector out or pairs positive against negative rays,
and after every step the ray list is cut back to the true extreme rays
by a rank test against the constraints processed so far.  That test is
what makes the output provably minimal: the smallest face containing a
ray r has span equal to the span of the cone intersected with the
hyperplanes of all processed constraints vanishing on r, and r is
extreme exactly when that face has dimension dim(lineality) + 1.

The module also derives positive gradings (sum of facet normals, zero
precisely on the lineality) and Hilbert bases of cone(generators) cut
with the integer lattice, via a certified degree bound rather than a
completion procedure: every irreducible element has grading at most the
sum of the gradings of the primitive extreme ray points.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

from .lattice import (
    IntMatrix,
    complete_to_basis,
    dot,
    in_span,
    is_zero_vec,
    kernel_basis,
    matrix_rank,
    primitive,
    saturation_basis,
    solve,
    unimodular_inverse,
    vec,
    vneg,
    vscale,
    vsub,
    Vec,
)


def _extreme_filter(rays: list[Vec], lineality: list[Vec],
                    normals: list[Vec], dim: int) -> list[Vec]:
    """Keep one representative of each extreme ray, judged against a
    complete list of valid constraints for the current cone."""
    if not rays:
        return []
    spanb = saturation_basis(rays + lineality, dim)
    lin_rank = matrix_rank(IntMatrix.from_rows(lineality, cols=dim)) if lineality else 0
    keep: list[Vec] = []
    seen: set[tuple[int, ...]] = set()
    for r in rays:
        if is_zero_vec(r):
            continue
        z = tuple(i for i, n in enumerate(normals) if dot(n, r) == 0)
        if z in seen:
            continue
        seen.add(z)
        zrows = [normals[i] for i in z]
        if zrows:
            m = IntMatrix.from_rows([[dot(n, b) for b in spanb] for n in zrows],
                                    cols=len(spanb))
            fdim = len(spanb) - matrix_rank(m)
        else:
            fdim = len(spanb)
        if fdim == lin_rank + 1:
            keep.append(r)
    return keep


def dual_description(inequalities: list[Vec], equations: list[Vec],
                     dim: int) -> tuple[list[Vec], list[Vec]]:
    """Extreme rays and lineality basis of
    {x : a.x >= 0 for a in inequalities, e.x = 0 for e in equations}."""
    constraints: list[Vec] = []
    for e in equations:
        e = vec(e)
        if not is_zero_vec(e):
            constraints.append(e)
            constraints.append(vneg(e))
    for a in inequalities:
        a = vec(a)
        if not is_zero_vec(a):
            constraints.append(a)

    lineality: list[Vec] = [tuple(1 if i == j else 0 for j in range(dim))
                            for i in range(dim)]
    rays: list[Vec] = []
    processed: list[Vec] = []
    for a in constraints:
        lvals = [dot(a, l) for l in lineality]
        if any(v != 0 for v in lvals):
            # pivot one lineality vector onto the strict side
            idx = min((i for i, v in enumerate(lvals) if v != 0),
                      key=lambda i: abs(lvals[i]))
            l0, v0 = lineality[idx], lvals[idx]
            if v0 < 0:
                l0, v0 = vneg(l0), -v0
            lineality = [primitive(vsub(vscale(v0, l), vscale(v, l0)))
                         for i, (l, v) in enumerate(zip(lineality, lvals))
                         if i != idx]
            # every old ray projects onto the new hyperplane; l0 spans
            # the strict side on its own
            rays = [l0] + [primitive(vsub(vscale(v0, r), vscale(dot(a, r), l0)))
                           for r in rays]
        else:
            pos = [r for r in rays if dot(a, r) > 0]
            neg = [r for r in rays if dot(a, r) < 0]
            rays = pos + [r for r in rays if dot(a, r) == 0]
            for p in pos:
                for q in neg:
                    # positive combination lying on the new hyperplane
                    rays.append(primitive(
                        vsub(vscale(dot(a, p), q), vscale(dot(a, q), p))))
        processed.append(a)
        rays = _extreme_filter(rays, lineality, processed, dim)

    lin = kernel_basis(IntMatrix.from_rows(constraints, cols=dim)) \
        if constraints else lineality
    return rays, lin


@dataclass(frozen=True)
class Face:
    """A face of a cone, identified by which extreme rays it contains."""

    ray_indices: tuple[int, ...]
    normal_indices: tuple[int, ...]  # facet normals vanishing on the face
    dim: int


class RationalCone:
    """A rational polyhedral cone in Z^dim, carried on both sides of
    duality; see the module docstring for the invariants."""

    def __init__(self, dim: int, rays: list[Vec], lineality_basis: list[Vec],
                 facet_normals: list[Vec], span_equations: list[Vec]):
        self.dim = dim
        self.rays = [primitive(r) for r in rays]
        self.lineality_basis = list(lineality_basis)
        self.facet_normals = [primitive(n) for n in facet_normals]
        self.span_equations = list(span_equations)
        self._faces: dict[frozenset, Face] | None = None
        for g in self.rays + self.lineality_basis:
            if not self.contains(g):
                raise AssertionError("inconsistent cone description")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_generators(cls, generators, dim: int) -> "RationalCone":
        gens = [primitive(vec(g)) for g in generators]
        gens = [g for g in gens if not is_zero_vec(g)]
        if gens:
            span_eqs = kernel_basis(IntMatrix.from_rows(gens, cols=dim))
            normals, _ = dual_description(gens, [], dim)
            # keep normals out of the dual lineality (span annihilator)
            normals = [n for n in normals if any(dot(n, g) != 0 for g in gens)]
        else:
            span_eqs = [tuple(1 if i == j else 0 for j in range(dim))
                        for i in range(dim)]
            normals = []
        rays, _ = dual_description(normals, span_eqs, dim)
        lin = kernel_basis(IntMatrix.from_rows(
            normals + span_eqs, cols=dim)) if normals + span_eqs else \
            [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
        cone = cls(dim, rays, lin, normals, span_eqs)
        for g in gens:
            if not cone.contains(g):
                raise AssertionError("generator escapes its own cone")
        return cone

    @classmethod
    def from_constraints(cls, inequalities, equations, dim: int) -> "RationalCone":
        ineqs = [vec(a) for a in inequalities]
        eqs = [vec(e) for e in equations]
        rays, lin = dual_description(ineqs, eqs, dim)
        return cls.from_generators(
            rays + lin + [vneg(l) for l in lin], dim)

    # -- membership ------------------------------------------------------

    def contains(self, v) -> bool:
        v = vec(v)
        return (all(dot(e, v) == 0 for e in self.span_equations)
                and all(dot(n, v) >= 0 for n in self.facet_normals))

    def in_relative_interior(self, v) -> bool:
        v = vec(v)
        return (all(dot(e, v) == 0 for e in self.span_equations)
                and all(dot(n, v) > 0 for n in self.facet_normals))

    def in_lineality(self, v) -> bool:
        return self.contains(v) and self.contains(vneg(vec(v)))

    # -- invariants -------------------------------------------------------

    @property
    def cone_dim(self) -> int:
        return self.dim - len(self.span_equations)

    @property
    def lineality_dim(self) -> int:
        return len(self.lineality_basis)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality_basis

    def grading_functional(self) -> Vec:
        """An integer functional nonnegative on the cone and vanishing
        exactly on the lineality."""
        lam = (0,) * self.dim
        for n in self.facet_normals:
            lam = tuple(a + b for a, b in zip(lam, n))
        return lam

    def same_cone(self, other: "RationalCone") -> bool:
        if self.dim != other.dim:
            return False
        mine = self.rays + self.lineality_basis + [vneg(l) for l in self.lineality_basis]
        theirs = other.rays + other.lineality_basis + [vneg(l) for l in other.lineality_basis]
        return (all(other.contains(v) for v in mine)
                and all(self.contains(v) for v in theirs))

    # -- faces -------------------------------------------------------------

    def _face_from_rayset(self, rayset: frozenset) -> Face:
        rays = [self.rays[j] for j in sorted(rayset)]
        nset = tuple(i for i, n in enumerate(self.facet_normals)
                     if all(dot(n, r) == 0 for r in rays))
        span = rays + self.lineality_basis
        fdim = matrix_rank(IntMatrix.from_rows(span, cols=self.dim)) if span else 0
        return Face(tuple(sorted(rayset)), nset, fdim)

    def faces(self) -> list[Face]:
        """All faces, the cone itself and the minimal face included."""
        if self._faces is None:
            found: dict[frozenset, Face] = {}
            queue = [frozenset(range(len(self.rays)))]
            while queue:
                key = queue.pop()
                if key in found:
                    continue
                face = self._face_from_rayset(key)
                found[key] = face
                for i, n in enumerate(self.facet_normals):
                    if i not in face.normal_indices:
                        queue.append(frozenset(
                            j for j in key if dot(n, self.rays[j]) == 0))
            self._faces = found
        return sorted(self._faces.values(),
                      key=lambda f: (f.dim, f.ray_indices))

    def facets(self) -> list[Face]:
        d = self.cone_dim
        return [f for f in self.faces() if f.dim == d - 1]

    def face_of_vector(self, v) -> Face:
        """The smallest face containing v."""
        v = vec(v)
        if not self.contains(v):
            raise ValueError("vector is not in the cone")
        s = [n for n in self.facet_normals if dot(n, v) == 0]
        rayset = frozenset(j for j, r in enumerate(self.rays)
                           if all(dot(n, r) == 0 for n in s))
        self.faces()
        return self._faces[rayset] if rayset in self._faces \
            else self._face_from_rayset(rayset)

    def face_contains(self, face: Face, v) -> bool:
        v = vec(v)
        return self.contains(v) and all(
            dot(self.facet_normals[i], v) == 0 for i in face.normal_indices)

    def face_lattice_points_basis(self, face: Face) -> list[Vec]:
        """Saturated basis of span(face) intersected with Z^dim."""
        gens = [self.rays[j] for j in face.ray_indices] + self.lineality_basis
        return saturation_basis(gens, self.dim) if gens else []

    def face_cone(self, face: Face) -> "RationalCone":
        gens = [self.rays[j] for j in face.ray_indices]
        lin = self.lineality_basis
        return RationalCone.from_generators(
            gens + lin + [vneg(l) for l in lin], self.dim)

    # -- binary operations --------------------------------------------------

    def intersection(self, other: "RationalCone") -> "RationalCone":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return RationalCone.from_constraints(
            self.facet_normals + other.facet_normals,
            self.span_equations + other.span_equations, self.dim)

    def is_face_of(self, other: "RationalCone") -> bool:
        mine = self.rays + self.lineality_basis + \
            [vneg(l) for l in self.lineality_basis]
        if not all(other.contains(v) for v in mine):
            return False
        # smallest face of other containing self
        s = [n for n in other.facet_normals
             if all(dot(n, v) == 0 for v in mine)]
        fray = [r for r in other.rays if all(dot(n, r) == 0 for n in s)]
        flin = other.lineality_basis
        return all(self.contains(v) for v in fray) and \
            all(self.in_lineality(l) for l in flin)


# ---------------------------------------------------------------------------
# Hilbert bases

_BOX_LIMIT = 6_000_000


def _pointed_hilbert(gens: list[Vec], dim: int) -> list[Vec]:
    """Hilbert basis of cone(gens) /\\ Z^dim for a full-dimensional
    pointed cone, by graded enumeration up to a certified bound."""
    cone = RationalCone.from_generators(gens, dim)
    if cone.span_equations or not cone.is_pointed:
        raise AssertionError("pointed full-dimensional cone expected")
    normals = cone.facet_normals
    lam = cone.grading_functional()
    bound = sum(dot(lam, r) for r in cone.rays)
    lows = [0] * dim
    highs = [0] * dim
    for r in cone.rays:
        lr = dot(lam, r)
        for j in range(dim):
            # coordinate range of the vertex (bound/lr) * r
            lows[j] = min(lows[j], (bound * r[j]) // lr)
            highs[j] = max(highs[j], -((-bound * r[j]) // lr))
    size = 1
    for lo, hi in zip(lows, highs):
        size *= hi - lo + 1
        if size > _BOX_LIMIT:
            raise RuntimeError("Hilbert basis enumeration box too large")
    graded: list[tuple[int, Vec]] = []
    for x in iter_product(*[range(lo, hi + 1) for lo, hi in zip(lows, highs)]):
        if all(dot(n, x) >= 0 for n in normals):
            d = dot(lam, x)
            if 0 < d <= bound:
                graded.append((d, x))
    graded.sort()
    atoms: list[tuple[int, Vec]] = []
    for d, x in graded:
        reducible = any(
            da < d and all(dot(n, vsub(x, a)) >= 0 for n in normals)
            for da, a in atoms)
        if not reducible:
            atoms.append((d, x))
    return [a for _, a in atoms]


def hilbert_basis(generators, dim: int) -> tuple[list[Vec], list[Vec]]:
    """Generators of cone(generators) /\\ Z^dim as a monoid: a saturated
    basis of its unit lattice plus the atoms of the pointed part."""
    gens = [vec(g) for g in generators if not is_zero_vec(vec(g))]
    if not gens:
        return [], []
    spanb = saturation_basis(gens, dim)
    m = len(spanb)
    basis_mat = IntMatrix.from_cols(spanb, rows=dim)
    coords = []
    for g in gens:
        c = solve(basis_mat, g)
        if c is None:
            raise AssertionError("generator outside its saturated span")
        coords.append(c)
    cone = RationalCone.from_generators(coords, m)
    lin = cone.lineality_basis
    k = len(lin)
    if k:
        t_mat = complete_to_basis(lin, m)
        t_inv = unimodular_inverse(t_mat)
    else:
        t_mat = t_inv = IntMatrix.identity(m)
    pgens = [t_inv.matvec(c)[k:] for c in coords]
    atoms_low = _pointed_hilbert(pgens, m - k) if m - k > 0 else []
    atoms = [basis_mat.matvec(t_mat.matvec((0,) * k + tuple(h)))
             for h in atoms_low]
    units = [basis_mat.matvec(l) for l in lin]
    return units, atoms
