"""Finitely generated pointed monoids, written additively.

The cancellative core of everything here is an :class:`AffineMonoid`: a
finitely generated submonoid of an ambient group Z^rank + T with T
finite, cut out by a list of generators.  The absorbing basepoint of a
pointed monoid is the separate singleton :data:`ZERO`; a general
finitely generated pointed monoid that is "pc" (pointed quotient of a
cancellative one) is a :class:`PcMonoid`, i.e. an affine monoid modulo
an ideal, with ZERO adjoined.

Membership in an affine monoid is decided exactly.  The recession cone
of the generators gives a grading functional that is zero exactly on
the unit generators, so deciding x in A reduces, by induction on the
grading of x, to a lattice solve inside the unit group.  Units are the
subgroup generated by the generators whose free part lies in the
lineality of the recession cone; that the submonoid they generate is
already a group follows by clearing denominators inside the lineality
and using that elements with zero free part have finite order.

Atoms (irreducible non-units) are computed modulo units and form the
unique minimal generating set modulo units.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .cones import Face, RationalCone
from .lattice import (
    CosetNormalizer,
    IntMatrix,
    PresentedAbGroup,
    Subquotient,
    Vec,
    dot,
    in_span,
    is_zero_vec,
    saturation_basis,
    solve,
    vadd,
    vec,
    vneg,
    vscale,
    vsub,
)


class _Zero:
    """The absorbing basepoint of a pointed monoid."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"


ZERO = _Zero()


@dataclass(frozen=True)
class AmbientGroup:
    """Z^rank + Z/t_1 + ... + Z/t_k, the group all monoid elements live in."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0 or any(t < 2 for t in self.torsion):
            raise ValueError("bad ambient group signature")

    @property
    def pres_dim(self) -> int:
        return self.rank + len(self.torsion)

    def torsion_relation_cols(self) -> list[Vec]:
        cols = []
        for j, t in enumerate(self.torsion):
            cols.append((0,) * self.rank
                        + tuple(t if i == j else 0 for i in range(len(self.torsion))))
        return cols

    def element(self, free, torsion=()) -> "GroupElement":
        free = vec(free)
        torsion = vec(torsion) if torsion else (0,) * len(self.torsion)
        if len(free) != self.rank or len(torsion) != len(self.torsion):
            raise ValueError("element does not match the ambient group")
        torsion = tuple(c % t for c, t in zip(torsion, self.torsion))
        return GroupElement(self, free, torsion)

    def zero(self) -> "GroupElement":
        return self.element((0,) * self.rank)

    def lift(self, el: "GroupElement") -> Vec:
        return el.free + el.tors

    def from_lift(self, v: Vec) -> "GroupElement":
        return self.element(v[:self.rank], v[self.rank:])

    def product(self, other: "AmbientGroup") -> "AmbientGroup":
        return AmbientGroup(self.rank + other.rank, self.torsion + other.torsion)

    def all_torsion_elements(self) -> list[Vec]:
        out = [()]
        for t in self.torsion:
            out = [prev + (c,) for prev in out for c in range(t)]
        return out


@dataclass(frozen=True)
class GroupElement:
    group: AmbientGroup
    free: Vec
    tors: Vec

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if other.group != self.group:
            raise ValueError("elements of different ambient groups")
        return self.group.element(vadd(self.free, other.free),
                                  vadd(self.tors, other.tors))

    def __neg__(self) -> "GroupElement":
        return self.group.element(vneg(self.free), vneg(self.tors))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def scaled(self, n: int) -> "GroupElement":
        return self.group.element(vscale(n, self.free), vscale(n, self.tors))

    @property
    def is_zero(self) -> bool:
        return is_zero_vec(self.free) and is_zero_vec(self.tors)

    def key(self) -> tuple:
        return (self.free, self.tors)

    def __repr__(self):
        if self.tors and any(self.tors):
            return f"({','.join(map(str, self.free))};{','.join(map(str, self.tors))})"
        return f"({','.join(map(str, self.free))})"


def product_element(group: AmbientGroup, a: GroupElement, b: GroupElement) -> GroupElement:
    """The element (a, b) of a product ambient group."""
    return group.element(a.free + b.free, a.tors + b.tors)


class UnitGroup:
    """The unit subgroup of an affine monoid, as a subgroup of the ambient."""

    def __init__(self, ambient: AmbientGroup, gens: list[GroupElement]):
        self.ambient = ambient
        self.gens = list(gens)
        self._cols = [ambient.lift(g) for g in self.gens] + \
            ambient.torsion_relation_cols()
        self._coset = CosetNormalizer(ambient.pres_dim, self._cols)
        n = ambient.pres_dim
        self._mat = (IntMatrix.from_cols(self._cols, rows=n) if self._cols
                     else IntMatrix(n, 0, tuple(() for _ in range(n))))

    def contains(self, el: GroupElement) -> bool:
        return solve(self._mat, self.ambient.lift(el)) is not None

    def coset_key(self, el: GroupElement) -> Vec:
        return self._coset.key(self.ambient.lift(el))

    def subquotient(self) -> Subquotient:
        return Subquotient(self.ambient.pres_dim, self._cols,
                           self.ambient.torsion_relation_cols())

    def group(self) -> PresentedAbGroup:
        return self.subquotient().group()

    def express(self, el: GroupElement) -> Vec | None:
        """Integer coefficients over the unit generators, if el is a unit."""
        x = solve(self._mat, self.ambient.lift(el))
        return None if x is None else x[:len(self.gens)]


class AffineMonoid:
    """A finitely generated (hence cancellative) submonoid of an ambient
    group, given by generators."""

    def __init__(self, ambient: AmbientGroup, generators):
        self.ambient = ambient
        gens = []
        for g in generators:
            if not isinstance(g, GroupElement):
                raise TypeError("generators must be group elements")
            if g.group != ambient:
                raise ValueError("generator in the wrong ambient group")
            if not g.is_zero:
                gens.append(g)
        self.gens: list[GroupElement] = gens
        self._member_memo: dict[tuple, bool] = {}

    # -- structure ---------------------------------------------------------

    @cached_property
    def recession_cone(self) -> RationalCone:
        return RationalCone.from_generators([g.free for g in self.gens],
                                            self.ambient.rank)

    @cached_property
    def grading(self) -> Vec:
        return self.recession_cone.grading_functional()

    def deg(self, el: GroupElement) -> int:
        return dot(self.grading, el.free)

    @cached_property
    def unit_group(self) -> UnitGroup:
        cone = self.recession_cone
        ugens = [g for g in self.gens if cone.in_lineality(g.free)]
        return UnitGroup(self.ambient, ugens)

    @cached_property
    def _nonunit_gens(self) -> list[GroupElement]:
        cone = self.recession_cone
        return [g for g in self.gens if not cone.in_lineality(g.free)]

    @cached_property
    def _free_fast(self) -> IntMatrix | None:
        """Solve-and-check shortcut when the generators are a basis-like
        family: torsion-free, independent free parts, no units."""
        if self.ambient.torsion or not self.gens:
            return None
        if self.unit_group.gens:
            return None
        m = IntMatrix.from_cols([g.free for g in self.gens],
                                rows=self.ambient.rank)
        from .lattice import matrix_rank
        if matrix_rank(m) != len(self.gens):
            return None
        return m

    def is_sharp(self) -> bool:
        """No nontrivial units."""
        return self.unit_group.group().is_trivial

    # -- membership ----------------------------------------------------------

    def contains(self, el: GroupElement) -> bool:
        if el.group != self.ambient:
            raise ValueError("element of the wrong ambient group")
        if el.is_zero:
            return True
        fast = self._free_fast
        if fast is not None:
            x = solve(fast, el.free)
            return x is not None and all(c >= 0 for c in x)
        return self._member(el)

    def _member(self, el: GroupElement) -> bool:
        key = el.key()
        memo = self._member_memo
        if key in memo:
            return memo[key]
        cone = self.recession_cone
        if not cone.contains(el.free):
            memo[key] = False
            return False
        if self.deg(el) == 0:
            memo[key] = res = self.unit_group.contains(el)
            return res
        memo[key] = False  # cycle guard; degree strictly drops anyway
        res = False
        for p in self._nonunit_gens:
            rem = el - p
            if cone.contains(rem.free) and self._member(rem):
                res = True
                break
        memo[key] = res
        return res

    def divides(self, a: GroupElement, b: GroupElement) -> bool:
        """a | b, i.e. b - a lies in the monoid."""
        return self.contains(b - a)

    # -- atoms -----------------------------------------------------------------

    @cached_property
    def atoms(self) -> list[GroupElement]:
        """Minimal generators modulo units, one representative per unit
        coset, sorted by grading then lift."""
        u = self.unit_group
        byc: dict[Vec, GroupElement] = {}
        for g in sorted(self._nonunit_gens,
                        key=lambda g: (self.deg(g), self.ambient.lift(g))):
            byc.setdefault(u.coset_key(g), g)
        cands = sorted(byc.values(),
                       key=lambda g: (self.deg(g), self.ambient.lift(g)))
        out: list[GroupElement] = []
        for g in cands:
            reducible = any(self.deg(a) < self.deg(g) and self.contains(g - a)
                            for a in out)
            if not reducible:
                out.append(g)
        return out

    # -- comparisons -----------------------------------------------------------

    def is_submonoid_of(self, other: "AffineMonoid") -> bool:
        return all(other.contains(g) for g in self.gens)

    def same_submonoid(self, other: "AffineMonoid") -> bool:
        return self.is_submonoid_of(other) and other.is_submonoid_of(self)

    # -- group completion ---------------------------------------------------------

    def completion_cols(self) -> list[Vec]:
        """Columns (in the ambient presentation) spanning the group
        completion together with the torsion relations."""
        return [self.ambient.lift(g) for g in self.gens] + \
            self.ambient.torsion_relation_cols()

    def completion_subquotient(self) -> Subquotient:
        return Subquotient(self.ambient.pres_dim, self.completion_cols(),
                           self.ambient.torsion_relation_cols())

    def completion_group(self) -> PresentedAbGroup:
        return self.completion_subquotient().group()

    def in_completion(self, el: GroupElement) -> bool:
        return in_span(self.completion_cols(), self.ambient.lift(el))

    def in_completion_saturation(self, el: GroupElement) -> bool:
        cols = self.completion_cols()
        sat = saturation_basis(cols, self.ambient.pres_dim)
        return in_span(sat, self.ambient.lift(el))

    # -- enumeration ------------------------------------------------------------

    def elements_mod_units_up_to(self, bound: int) -> dict[Vec, GroupElement]:
        """One representative per unit coset of every monoid element of
        grading at most the bound."""
        u = self.unit_group
        out: dict[Vec, GroupElement] = {}
        frontier = [self.ambient.zero()]
        out[u.coset_key(frontier[0])] = frontier[0]
        atoms = self.atoms
        while frontier:
            nxt = []
            for el in frontier:
                for a in atoms:
                    cand = el + a
                    if self.deg(cand) > bound:
                        continue
                    k = u.coset_key(cand)
                    if k not in out:
                        out[k] = cand
                        nxt.append(cand)
            frontier = nxt
        return out

    # -- localization ------------------------------------------------------------

    def face_generators(self, face: Face) -> list[GroupElement]:
        cone = self.recession_cone
        return [g for g in self.gens if cone.face_contains(face, g.free)]

    def localize(self, face: Face) -> "AffineMonoid":
        """Invert the generators lying on a face of the recession cone."""
        inv = [-g for g in self.face_generators(face)]
        return AffineMonoid(self.ambient, self.gens + inv)

    def __repr__(self):
        return f"AffineMonoid({self.ambient.rank}+{list(self.ambient.torsion)}, {self.gens})"


class PcMonoid:
    """A pointed monoid of the form (cancellative affine monoid)/(proper
    ideal), with basepoint ZERO.  An empty ideal gives the pointed
    closure of the cancellative monoid itself."""

    def __init__(self, cancellative: AffineMonoid, ideal_gens=()):
        self.cancellative = cancellative
        gens: list[GroupElement] = []
        for g in ideal_gens:
            if g is ZERO:
                continue
            if not cancellative.contains(g):
                raise ValueError("ideal generator outside the monoid")
            gens.append(g)
        for g in gens:
            if cancellative.contains(-g):
                raise ValueError("ideal contains a unit; quotient collapses")
        self.ideal_gens = _reduce_ideal_gens(cancellative, gens)

    @property
    def ambient(self) -> AmbientGroup:
        return self.cancellative.ambient

    @property
    def is_cancellative(self) -> bool:
        return not self.ideal_gens

    def is_zero(self, el) -> bool:
        if el is ZERO:
            return True
        return any(self.cancellative.contains(el - g) for g in self.ideal_gens)

    def contains(self, el) -> bool:
        """Is el a (possibly zero) element of the quotient, i.e. does it
        come from the cancellative part or equal ZERO?"""
        if el is ZERO:
            return True
        return self.cancellative.contains(el)

    def add(self, a, b):
        if a is ZERO or b is ZERO:
            return ZERO
        s = a + b
        return ZERO if self.is_zero(s) else s

    @property
    def unit_group(self) -> UnitGroup:
        return self.cancellative.unit_group

    def units_presentation(self) -> PresentedAbGroup:
        return self.cancellative.unit_group.group()

    def nonzero_elements_up_to(self, bound: int) -> dict[Vec, GroupElement]:
        out = {}
        for k, el in self.cancellative.elements_mod_units_up_to(bound).items():
            if not self.is_zero(el):
                out[k] = el
        return out

    def same_pc_monoid(self, other: "PcMonoid") -> bool:
        if not self.cancellative.same_submonoid(other.cancellative):
            return False
        return (all(other.is_zero(g) for g in self.ideal_gens)
                and all(self.is_zero(g) for g in other.ideal_gens))

    def __repr__(self):
        return f"PcMonoid({self.cancellative!r}, ideal={self.ideal_gens})"


def _reduce_ideal_gens(monoid: AffineMonoid,
                       gens: list[GroupElement]) -> list[GroupElement]:
    """Unique divisibility-minimal generating set of the ideal, one
    representative per unit coset."""
    u = monoid.unit_group
    byc: dict[Vec, GroupElement] = {}
    for g in sorted(gens, key=lambda g: (monoid.deg(g), monoid.ambient.lift(g))):
        byc.setdefault(u.coset_key(g), g)
    cands = sorted(byc.values(),
                   key=lambda g: (monoid.deg(g), monoid.ambient.lift(g)))
    out = []
    for g in cands:
        if not any(monoid.contains(g - h) for h in out):
            out.append(g)
    return out


def smash(a: PcMonoid, b: PcMonoid) -> tuple[PcMonoid, "GroupHom", "GroupHom"]:
    """Smash product (A x B with ZERO glued), together with the two
    coordinate inclusions of ambient groups."""
    amb = a.ambient.product(b.ambient)
    za, zb = a.ambient.zero(), b.ambient.zero()
    gens = [product_element(amb, g, zb) for g in a.cancellative.gens] + \
        [product_element(amb, za, h) for h in b.cancellative.gens]
    canc = AffineMonoid(amb, gens)
    ideal = [product_element(amb, g, zb) for g in a.ideal_gens] + \
        [product_element(amb, za, h) for h in b.ideal_gens]
    inc_a = GroupHom.coordinate_inclusion(a.ambient, b.ambient, first=True)
    inc_b = GroupHom.coordinate_inclusion(a.ambient, b.ambient, first=False)
    return PcMonoid(canc, ideal), inc_a, inc_b


class GroupHom:
    """A homomorphism of ambient groups, as an integer matrix between
    presentations (free coordinates first, then torsion coordinates)."""

    def __init__(self, src: AmbientGroup, dst: AmbientGroup, matrix: IntMatrix):
        if matrix.rows != dst.pres_dim or matrix.cols != src.pres_dim:
            raise ValueError("matrix does not match the presentations")
        self.src = src
        self.dst = dst
        self.matrix = matrix
        dst_rels = dst.torsion_relation_cols()
        for r in src.torsion_relation_cols():
            img = matrix.matvec(r)
            if not in_span(dst_rels, img):
                raise ValueError("matrix does not respect torsion relations")

    @classmethod
    def identity(cls, amb: AmbientGroup) -> "GroupHom":
        return cls(amb, amb, IntMatrix.identity(amb.pres_dim))

    @classmethod
    def from_free_matrix(cls, src: AmbientGroup, dst: AmbientGroup,
                         free_matrix) -> "GroupHom":
        """A hom of free ambient groups (no torsion on either side)."""
        if src.torsion or dst.torsion:
            raise ValueError("free matrix constructor needs torsion-free groups")
        return cls(src, dst, IntMatrix.from_rows(free_matrix, cols=src.rank))

    @classmethod
    def coordinate_inclusion(cls, a: AmbientGroup, b: AmbientGroup,
                             first: bool) -> "GroupHom":
        prod = a.product(b)
        src = a if first else b
        rows = []
        for i in range(prod.pres_dim):
            rows.append([0] * src.pres_dim)
        # block layout of prod lifts: a.free, b.free, a.tors, b.tors
        if first:
            for i in range(a.rank):
                rows[i][i] = 1
            for j in range(len(a.torsion)):
                rows[a.rank + b.rank + j][a.rank + j] = 1
        else:
            for i in range(b.rank):
                rows[a.rank + i][i] = 1
            for j in range(len(b.torsion)):
                rows[a.rank + b.rank + len(a.torsion) + j][b.rank + j] = 1
        return cls(src, prod, IntMatrix.from_rows(rows, cols=src.pres_dim))

    def apply(self, el: GroupElement) -> GroupElement:
        if el.group != self.src:
            raise ValueError("element of the wrong group")
        return self.dst.from_lift(self.matrix.matvec(self.src.lift(el)))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self after inner."""
        if inner.dst != self.src:
            raise ValueError("cannot compose")
        return GroupHom(inner.src, self.dst, self.matrix.matmul(inner.matrix))

    def preimage(self, el: GroupElement) -> GroupElement | None:
        """Some preimage of el, or None."""
        rels = self.dst.torsion_relation_cols()
        cols = self.matrix.columns() + rels
        m = IntMatrix.from_cols(cols, rows=self.dst.pres_dim)
        x = solve(m, self.dst.lift(el))
        if x is None:
            return None
        return self.src.from_lift(x[:self.src.pres_dim])

    def is_injective_on(self, gens_subquotient: Subquotient) -> bool:
        from .lattice import Hom
        sq_dst = Subquotient(self.dst.pres_dim, None,
                             self.dst.torsion_relation_cols())
        return Hom(gens_subquotient, sq_dst, self.matrix).is_injective()


class MonoidHom:
    """A basepoint-preserving homomorphism of pc monoids, carried by a
    group homomorphism of the ambient groups."""

    def __init__(self, src: PcMonoid, dst: PcMonoid, ghom: GroupHom,
                 check: bool = True):
        self.src = src
        self.dst = dst
        self.ghom = ghom
        if check:
            for g in src.cancellative.gens:
                img = ghom.apply(g)
                if not dst.cancellative.contains(img):
                    raise ValueError("generator image escapes the target")
            for g in src.ideal_gens:
                if not dst.is_zero(ghom.apply(g)):
                    raise ValueError("ideal is not carried into the ideal")

    def apply(self, el):
        if el is ZERO:
            return ZERO
        img = self.ghom.apply(el)
        return ZERO if self.dst.is_zero(img) else img

    def apply_raw(self, el: GroupElement) -> GroupElement:
        return self.ghom.apply(el)

    def compose(self, inner: "MonoidHom") -> "MonoidHom":
        return MonoidHom(inner.src, self.dst,
                         self.ghom.compose(inner.ghom), check=False)


def localize_pc(pc: PcMonoid, face: Face) -> tuple[PcMonoid, MonoidHom]:
    """Localization of a pc monoid at a face of the recession cone of its
    cancellative part (the prime it defines must contain the ideal)."""
    canc = pc.cancellative.localize(face)
    cone = pc.cancellative.recession_cone
    for g in pc.ideal_gens:
        if cone.face_contains(face, g.free):
            raise ValueError("face meets the ideal; localization collapses")
    loc = PcMonoid(canc, pc.ideal_gens)
    hom = MonoidHom(pc, loc, GroupHom.identity(pc.ambient), check=False)
    return loc, hom
