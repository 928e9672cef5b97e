"""Normalization, seminormalization, and discrete valuations.

The normalization of a cancellative monoid A is its integral closure in
the group it generates: x is integral iff some positive multiple lands
in A, which happens exactly when x lies in the group of A and its free
part lies in the recession cone.  Generators come from a Hilbert basis
of the cone in the free-part lattice of the group, lifted back through
the generators, together with generators of the torsion subgroup.

The seminormalization is the union over faces F of (relative interior
of F) /\\ (group generated by the part of A on F).  It equals
{x : nx lies in A for all large n}, and it is generated by the
generators of A together with, for each face, the minimal elements of
that face piece under subtraction of the face generators.  Those
minimal elements have certified bounded degree: if y is minimal, every
generator g is blocked by some facet normal n with n.y <= n.g, the
blocking normals sum to a grading of the face (no generator can sit in
the common zero face of the blockers), and gradings compare on rays.

Height-one valuations of a normal monoid are the facet functionals of
the recession cone, renormalized to be surjective onto Z on the
free-part lattice of the group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cones import RationalCone, hilbert_basis
from .lattice import (
    IntMatrix,
    PresentedAbGroup,
    Vec,
    cokernel,
    complete_to_basis,
    dot,
    is_zero_vec,
    kernel_basis,
    lattice_basis,
    solve,
    unimodular_inverse,
    vec_gcd,
)
from .monoid import (
    ZERO,
    AffineMonoid,
    GroupElement,
    PcMonoid,
    UnitGroup,
)


# ---------------------------------------------------------------------------
# normalization

def _group_combination(monoid: AffineMonoid, free: Vec) -> GroupElement:
    """Some element of the group of the monoid with the given free part."""
    mat = IntMatrix.from_cols([g.free for g in monoid.gens],
                              rows=monoid.ambient.rank)
    c = solve(mat, free)
    if c is None:
        raise AssertionError("free vector outside the group lattice")
    out = monoid.ambient.zero()
    for coeff, g in zip(c, monoid.gens):
        out = out + g.scaled(coeff)
    return out


def _torsion_subgroup_gens(monoid: AffineMonoid) -> list[GroupElement]:
    """Generators of the subgroup of elements of the monoid's group with
    zero free part."""
    mat = IntMatrix.from_cols([g.free for g in monoid.gens],
                              rows=monoid.ambient.rank)
    out = []
    for c in kernel_basis(mat):
        t = monoid.ambient.zero()
        for coeff, g in zip(c, monoid.gens):
            t = t + g.scaled(coeff)
        if not t.is_zero:
            out.append(t)
    return out


def normalize(monoid: AffineMonoid) -> AffineMonoid:
    """Integral closure of the monoid in its group."""
    amb = monoid.ambient
    frees = [g.free for g in monoid.gens if not is_zero_vec(g.free)]
    tors = _torsion_subgroup_gens(monoid)
    if not frees:
        return AffineMonoid(amb, list(monoid.gens))
    basis = lattice_basis(frees, amb.rank)
    bmat = IntMatrix.from_cols(basis, rows=amb.rank)
    coords = []
    for f in frees:
        c = solve(bmat, f)
        assert c is not None
        coords.append(c)
    units, atoms = hilbert_basis(coords, len(basis))
    gens: list[GroupElement] = []
    for u in units:
        x = _group_combination(monoid, bmat.matvec(u))
        gens += [x, -x]
    for a in atoms:
        gens.append(_group_combination(monoid, bmat.matvec(a)))
    gens += tors
    return AffineMonoid(amb, gens)


def in_normalization(monoid: AffineMonoid, el: GroupElement) -> bool:
    return monoid.in_completion(el) and monoid.recession_cone.contains(el.free)


def is_normal(monoid: AffineMonoid) -> bool:
    return all(monoid.contains(g) for g in normalize(monoid).gens)


def is_integral_over(monoid: AffineMonoid, el: GroupElement) -> bool:
    """Some positive multiple of el lies in the monoid."""
    return (monoid.in_completion_saturation(el)
            and monoid.recession_cone.contains(el.free))


# ---------------------------------------------------------------------------
# seminormalization

def _face_group_unit(face_gens: list[GroupElement], amb) -> UnitGroup:
    return UnitGroup(amb, list(face_gens) + [-g for g in face_gens])


def in_seminormalization(monoid: AffineMonoid, el: GroupElement) -> bool:
    """el lies in the group generated by the part of the monoid on the
    face its free part spans."""
    cone = monoid.recession_cone
    if not cone.contains(el.free):
        return False
    face = cone.face_of_vector(el.free)
    fg = monoid.face_generators(face)
    return _face_group_unit(fg, monoid.ambient).contains(el)


def _torsion_closure(gens: list[GroupElement], amb) -> list[GroupElement]:
    """All elements of the finite group generated by torsion elements."""
    seen = {amb.zero().key(): amb.zero()}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y.key() not in seen:
                    seen[y.key()] = y
                    nxt.append(y)
        frontier = nxt
    return list(seen.values())


def _face_module_gens(monoid: AffineMonoid, face) -> list[GroupElement]:
    """Minimal elements of relint(face) /\\ group(A on face) under
    subtraction of the face generators, one per unit coset, every
    torsion coset included."""
    amb = monoid.ambient
    fg = monoid.face_generators(face)
    ffrees = [g.free for g in fg if not is_zero_vec(g.free)]
    if not ffrees:
        return []
    fbasis = lattice_basis(ffrees, amb.rank)
    fbmat = IntMatrix.from_cols(fbasis, rows=amb.rank)
    fcoords = []
    for f in ffrees:
        c = solve(fbmat, f)
        assert c is not None
        fcoords.append(c)
    m = len(fbasis)
    fcone = RationalCone.from_generators(fcoords, m)
    lin = fcone.lineality_basis
    k = len(lin)
    if k:
        tmat = complete_to_basis(lin, m)
        tinv = unimodular_inverse(tmat)
    else:
        tmat = tinv = IntMatrix.identity(m)
    qdim = m - k
    if qdim == 0:
        return []
    qgens = [tuple(tinv.matvec(c)[k:]) for c in fcoords]
    qcone = RationalCone.from_generators(qgens, qdim)
    normals = qcone.facet_normals
    lam = qcone.grading_functional()
    rays = qcone.rays
    kmax = max(dot(lam, r) for r in rays)
    bound = kmax * sum(max(dot(n, g) for g in qgens) for n in normals)
    lows = [0] * qdim
    highs = [0] * qdim
    for r in rays:
        lr = dot(lam, r)
        for j in range(qdim):
            lows[j] = min(lows[j], (bound * r[j]) // lr)
            highs[j] = max(highs[j], -((-bound * r[j]) // lr))
    nonunit = [g for g in qgens if not is_zero_vec(g)]
    minimal_qs = []
    from itertools import product as iter_product
    for q in iter_product(*[range(lo, hi + 1) for lo, hi in zip(lows, highs)]):
        if dot(lam, q) > bound or any(dot(n, q) < 1 for n in normals):
            continue
        if any(all(dot(n, tuple(a - b for a, b in zip(q, g))) >= 1
                   for n in normals) for g in nonunit):
            continue
        minimal_qs.append(q)
    sub = AffineMonoid(amb, fg)
    tors = _torsion_closure(_torsion_subgroup_gens(sub), amb)
    out = []
    for q in minimal_qs:
        free = fbmat.matvec(tmat.matvec((0,) * k + q))
        base = _group_combination(sub, free)
        for t in tors:
            out.append(base + t)
    return out


def seminormalize(monoid: AffineMonoid) -> AffineMonoid:
    amb = monoid.ambient
    cone = monoid.recession_cone
    gens = list(monoid.gens)
    lin_dim = cone.lineality_dim
    for face in cone.faces():
        if face.dim <= lin_dim:
            continue
        gens += _face_module_gens(monoid, face)
    result = AffineMonoid(amb, gens)
    for g in result.gens:
        assert in_seminormalization(monoid, g)
    return result


def is_seminormal(monoid: AffineMonoid) -> bool:
    return all(monoid.contains(g) for g in seminormalize(monoid).gens)


# ---------------------------------------------------------------------------
# valuations

@dataclass(frozen=True)
class DiscreteValuation:
    """A facet functional, renormalized so its image on the group's
    free-part lattice is all of Z."""
    normal: Vec
    denominator: int

    def value(self, el) -> int:
        if el is ZERO:
            raise ValueError("the basepoint has no valuation")
        q, r = divmod(dot(self.normal, el.free), self.denominator)
        if r:
            raise ValueError("element outside the valuation lattice")
        return q


def valuations_at_height_one(monoid: AffineMonoid) -> list[DiscreteValuation]:
    amb = monoid.ambient
    cone = monoid.recession_cone
    frees = [g.free for g in monoid.gens if not is_zero_vec(g.free)]
    basis = lattice_basis(frees, amb.rank) if frees else []
    out = []
    for n in cone.facet_normals:
        d = vec_gcd([dot(n, b) for b in basis])
        out.append(DiscreteValuation(n, d if d else 1))
    return out


def class_group_of_affine(monoid: AffineMonoid) -> PresentedAbGroup:
    """Cokernel of the divisor map on generators, rows indexed by the
    height-one valuations."""
    if not is_normal(monoid):
        raise ValueError("class group is defined for a normal monoid")
    vals = valuations_at_height_one(monoid)
    cols = [[v.value(g) for v in vals] for g in monoid.gens]
    return cokernel(IntMatrix.from_cols(cols, rows=len(vals)))


@dataclass(frozen=True)
class DvMonoidStructure:
    valuation: DiscreteValuation
    uniformizer: GroupElement


def dv_structure(monoid: AffineMonoid) -> DvMonoidStructure:
    """The valuation and a uniformizer of a normal monoid with exactly
    one height-one prime: every element is a unit plus a multiple of
    the uniformizer."""
    vals = valuations_at_height_one(monoid)
    if len(vals) != 1:
        raise ValueError("not of dimension one")
    if not is_normal(monoid):
        raise ValueError("not normal")
    v = vals[0]
    pi = next((a for a in monoid.atoms if v.value(a) == 1), None)
    assert pi is not None
    return DvMonoidStructure(v, pi)


def dv_factor(monoid: AffineMonoid, el: GroupElement
              ) -> tuple[GroupElement, int]:
    """Write el as unit + n * uniformizer; the pair is unique."""
    st = dv_structure(monoid)
    n = st.valuation.value(el)
    u = el - st.uniformizer.scaled(n)
    assert monoid.unit_group.contains(u)
    return u, n


# ---------------------------------------------------------------------------
# normalization of the spectrum of a pc monoid

class SectionsMonoid:
    """The pointed product of pc monoids: global sections of a finite
    disjoint union of affine monoid schemes.  A section is a tuple whose
    entries are component elements or ZERO; addition is componentwise
    with ZERO absorbing, and the basepoint is the all-ZERO section."""

    def __init__(self, components: list[PcMonoid]):
        self.components = components

    def section(self, parts) -> tuple:
        parts = tuple(parts)
        assert len(parts) == len(self.components)
        for p, comp in zip(parts, self.components):
            assert p is ZERO or comp.contains(p)
        return parts

    def identity(self) -> tuple:
        return tuple(c.ambient.zero() for c in self.components)

    def zero(self) -> tuple:
        return tuple(ZERO for _ in self.components)

    def add(self, s: tuple, t: tuple) -> tuple:
        return tuple(ZERO if (a is ZERO or b is ZERO) else a + b
                     for a, b in zip(s, t))

    def key(self, s: tuple) -> tuple:
        return tuple("z" if p is ZERO else p.key() for p in s)

    def canonical_generators(self) -> list[tuple]:
        gens = []
        ident = self.identity()
        for i, comp in enumerate(self.components):
            for g in comp.cancellative.gens:
                gens.append(tuple(g if j == i else ident[j]
                                  for j in range(len(self.components))))
            gens.append(tuple(ZERO if j == i else ident[j]
                              for j in range(len(self.components))))
        return gens

    def _deg(self, s: tuple) -> int:
        return sum(0 if p is ZERO else comp.cancellative.deg(p)
                   for p, comp in zip(s, self.components))

    def generated_by(self, gens: list[tuple]) -> bool:
        """Do the given sections generate the whole monoid?  Sound and
        complete: the canonical generators must be reachable, and the
        search space is degree-capped by their degrees."""
        gens = [self.section(g) for g in gens]
        targets = {self.key(t) for t in self.canonical_generators()}
        cap = max(self._deg(t) for t in self.canonical_generators()) + \
            max((self._deg(g) for g in gens), default=0)
        start = self.identity()
        seen = {self.key(start)}
        frontier = [start]
        targets.discard(self.key(start))
        while frontier and targets:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = self.add(s, g)
                    k = self.key(t)
                    if k in seen or self._deg(t) > cap:
                        continue
                    seen.add(k)
                    targets.discard(k)
                    nxt.append(t)
            frontier = nxt
        return not targets


@dataclass
class NormalizationScheme:
    """Disjoint union, over the minimal primes, of the spectra of the
    normalized quotient monoids, with its global sections."""
    branches: list[tuple]
    sections: SectionsMonoid


def normalization_scheme(parent: PcMonoid) -> NormalizationScheme:
    from .ideals import MonoidIdeal
    primes = MonoidIdeal(parent, ()).minimal_primes()
    branches = []
    comps = []
    for p in primes:
        quo = p.quotient()
        nor = normalize(quo.cancellative)
        branches.append((p, nor))
        comps.append(PcMonoid(nor, []))
    return NormalizationScheme(branches, SectionsMonoid(comps))
