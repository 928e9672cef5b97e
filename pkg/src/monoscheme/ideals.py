"""Ideal theory of pointed monoids.

An ideal of a pc monoid A = C/I0 is represented by the ideal of the
cancellative part C that it pulls back to, stored as its unique
divisibility-minimal generating set (one representative per unit
coset).  The zero ideal of A corresponds to I0 itself.

Primes correspond to faces of the recession cone: p_F consists of the
elements whose free part lies outside the face F, and every prime
arises this way.  That correspondence makes radicals exact for every
parent: the radical is the intersection of the minimal face primes over
the ideal, and an intersection of face primes is generated by the sums
of atoms over the minimal hitting sets (each prime must receive an atom
outside its face), which is a finite exact computation.

Primary decomposition is exact for free parents (iterated coprime
splitting of monomial ideals, with components merged by radical and
made irredundant); for general parents a degree-bounded splitting along
annihilator chains is provided and the results are flagged as
uncertified.
"""

from __future__ import annotations

from functools import lru_cache

from .cones import Face
from .lattice import Vec, dot, solve
from .monoid import (
    ZERO,
    AffineMonoid,
    GroupElement,
    PcMonoid,
    _reduce_ideal_gens,
    localize_pc,
)


class MonoidIdeal:
    """An ideal of a pc monoid, in divisibility-minimal normal form."""

    def __init__(self, parent: PcMonoid, gens=(), certified: bool = True):
        self.parent = parent
        canc = parent.cancellative
        collected: list[GroupElement] = []
        self.is_unit_ideal = False
        for g in gens:
            if g is ZERO:
                continue
            if not canc.contains(g):
                raise ValueError("ideal generator outside the monoid")
            if canc.contains(-g):
                # a unit generator makes this the unit ideal (all of A)
                self.is_unit_ideal = True
            collected.append(g)
        if self.is_unit_ideal:
            self.cgens = [canc.ambient.zero()]
        else:
            self.cgens = _reduce_ideal_gens(canc,
                                            collected + list(parent.ideal_gens))
        self.certified = certified

    # -- membership and comparisons -------------------------------------

    def contains(self, el) -> bool:
        if el is ZERO:
            return True
        canc = self.parent.cancellative
        return any(canc.contains(el - g) for g in self.cgens)

    def _gen_keys(self) -> frozenset:
        u = self.parent.cancellative.unit_group
        return frozenset(u.coset_key(g) for g in self.cgens)

    def same_ideal(self, other: "MonoidIdeal") -> bool:
        return self._gen_keys() == other._gen_keys()

    def is_subset_of(self, other: "MonoidIdeal") -> bool:
        return all(other.contains(g) for g in self.cgens)

    @property
    def is_zero_ideal(self) -> bool:
        zero = MonoidIdeal(self.parent, ())
        return self.same_ideal(zero)

    # -- arithmetic -------------------------------------------------------

    def sum(self, other: "MonoidIdeal") -> "MonoidIdeal":
        return MonoidIdeal(self.parent, self.cgens + other.cgens,
                           certified=self.certified and other.certified)

    def product(self, other: "MonoidIdeal") -> "MonoidIdeal":
        gens = [g + h for g in self.cgens for h in other.cgens]
        return MonoidIdeal(self.parent, gens,
                           certified=self.certified and other.certified)

    def intersection(self, other: "MonoidIdeal",
                     degree_bound: int | None = None) -> "MonoidIdeal":
        exps = _free_exponents(self.parent)
        if exps is not None:
            mine = [exps.of(g) for g in self.cgens]
            theirs = [exps.of(g) for g in other.cgens]
            gens = [exps.back(_lcm_vec(a, b)) for a in mine for b in theirs]
            return MonoidIdeal(self.parent, gens,
                               certified=self.certified and other.certified)
        if degree_bound is None:
            raise ValueError("degree_bound required for a non-free parent")
        canc = self.parent.cancellative
        found = [el for el in canc.elements_mod_units_up_to(degree_bound).values()
                 if self.contains(el) and other.contains(el)]
        return MonoidIdeal(self.parent, found, certified=False)

    def colon(self, x: GroupElement,
              degree_bound: int | None = None) -> "MonoidIdeal":
        """(I : x) = elements a with a + x in I."""
        exps = _free_exponents(self.parent)
        if exps is not None:
            xe = exps.of(x)
            gens = [exps.back(tuple(max(c - d, 0) for c, d in zip(exps.of(g), xe)))
                    for g in self.cgens]
            return MonoidIdeal(self.parent, gens, certified=self.certified)
        if degree_bound is None:
            raise ValueError("degree_bound required for a non-free parent")
        canc = self.parent.cancellative
        found = [el for el in canc.elements_mod_units_up_to(degree_bound).values()
                 if self.contains(el + x)]
        return MonoidIdeal(self.parent, found, certified=False)

    # -- primes and radicals -----------------------------------------------

    def avoiding_faces(self) -> list[Face]:
        """Faces of the recession cone whose prime contains the ideal."""
        cone = self.parent.cancellative.recession_cone
        return [f for f in cone.faces()
                if not any(cone.face_contains(f, g.free) for g in self.cgens)]

    def minimal_primes(self) -> list["PrimeIdeal"]:
        faces = self.avoiding_faces()
        maximal = []
        for f in faces:
            rs = set(f.ray_indices)
            if not any(set(g.ray_indices) > rs for g in faces):
                maximal.append(f)
        maximal.sort(key=lambda f: (-f.dim, f.ray_indices))
        return [PrimeIdeal(self.parent, f) for f in maximal]

    def radical(self) -> "MonoidIdeal":
        if self.is_unit_ideal:
            return self
        return intersect_primes(self.parent, self.minimal_primes())

    def is_radical(self) -> bool:
        return self.same_ideal(self.radical())

    def is_prime(self) -> bool:
        ps = self.minimal_primes()
        return len(ps) == 1 and self.same_ideal(ps[0].to_ideal())

    # -- primary decomposition ------------------------------------------------

    def is_primary(self, degree_bound: int | None = None) -> bool:
        if self.is_unit_ideal:
            return False  # primary ideals are proper
        if not self.cgens:
            return True  # the zero ideal of a cancellative monoid is prime
        exps = _free_exponents(self.parent)
        if exps is not None:
            return _monomial_is_primary(
                frozenset(exps.of(g) for g in self.cgens))
        if degree_bound is None:
            raise ValueError("degree_bound required for a non-free parent")
        rad = self.radical()
        canc = self.parent.cancellative
        els = list(canc.elements_mod_units_up_to(degree_bound).values())
        for x in els:
            for y in els:
                if self.contains(x + y) and not self.contains(x) \
                        and not rad.contains(y):
                    return False
        return True

    def primary_decomposition(self, order: str = "lex",
                              degree_bound: int | None = None
                              ) -> list["MonoidIdeal"]:
        if self.is_unit_ideal:
            return []  # empty intersection
        if not self.cgens:
            return [MonoidIdeal(self.parent, ())]
        exps = _free_exponents(self.parent)
        if exps is not None:
            comps = _monomial_decomposition(
                frozenset(exps.of(g) for g in self.cgens), order)
            return [MonoidIdeal(self.parent, [exps.back(e) for e in comp])
                    for comp in comps]
        if degree_bound is None:
            raise ValueError("degree_bound required for a non-free parent")
        return self._bounded_decomposition(degree_bound, depth=6)

    def _bounded_decomposition(self, bound: int, depth: int) -> list["MonoidIdeal"]:
        if depth == 0 or self.is_primary(degree_bound=bound):
            return [MonoidIdeal(self.parent, self.cgens, certified=False)]
        rad = self.radical()
        canc = self.parent.cancellative
        els = list(canc.elements_mod_units_up_to(bound).values())
        witness = None
        for x in els:
            for y in els:
                if self.contains(x + y) and not self.contains(x) \
                        and not rad.contains(y):
                    witness = y
                    break
            if witness is not None:
                break
        if witness is None:
            return [MonoidIdeal(self.parent, self.cgens, certified=False)]
        n = 1
        while n < 16:
            a = self.colon(witness.scaled(n), degree_bound=bound)
            b = self.colon(witness.scaled(2 * n), degree_bound=bound)
            if a.same_ideal(b):
                break
            n *= 2
        plus = MonoidIdeal(self.parent,
                           self.cgens + [witness.scaled(n)], certified=False)
        colon = self.colon(witness.scaled(n), degree_bound=bound)
        out = plus._bounded_decomposition(bound, depth - 1) + \
            colon._bounded_decomposition(bound, depth - 1)
        # drop components that contain the intersection of the others
        kept = list(out)
        changed = True
        while changed:
            changed = False
            for i, c in enumerate(kept):
                rest = kept[:i] + kept[i + 1:]
                if rest and _contains_intersection(rest, c, bound):
                    kept = rest
                    changed = True
                    break
        return kept

    def associated_primes(self, order: str = "lex",
                          degree_bound: int | None = None) -> list["PrimeIdeal"]:
        comps = self.primary_decomposition(order=order, degree_bound=degree_bound)
        seen: dict[tuple, PrimeIdeal] = {}
        for c in comps:
            ps = c.minimal_primes()
            if len(ps) != 1:
                raise AssertionError("primary component with non-prime radical")
            seen.setdefault(ps[0].face.ray_indices, ps[0])
        return sorted(seen.values(), key=lambda p: (p.height(), p.face.ray_indices))

    def __repr__(self):
        return f"MonoidIdeal({[g for g in self.cgens]})"


def _contains_intersection(comps: list[MonoidIdeal], target: MonoidIdeal,
                           bound: int) -> bool:
    canc = target.parent.cancellative
    for el in canc.elements_mod_units_up_to(bound).values():
        if all(c.contains(el) for c in comps) and not target.contains(el):
            return False
    return True


class PrimeIdeal:
    """The prime ideal attached to a face of the recession cone: all
    elements whose free part misses the face."""

    def __init__(self, parent: PcMonoid, face: Face):
        self.parent = parent
        self.face = face
        cone = parent.cancellative.recession_cone
        for g in parent.ideal_gens:
            if cone.face_contains(face, g.free):
                raise ValueError("face meets the collapsed ideal; not a prime here")
        self._ideal: MonoidIdeal | None = None

    def contains(self, el) -> bool:
        if el is ZERO:
            return True
        cone = self.parent.cancellative.recession_cone
        return not cone.face_contains(self.face, el.free)

    def to_ideal(self) -> MonoidIdeal:
        if self._ideal is None:
            canc = self.parent.cancellative
            cone = canc.recession_cone
            gens = [a for a in canc.atoms
                    if not cone.face_contains(self.face, a.free)]
            self._ideal = MonoidIdeal(self.parent, gens)
        return self._ideal

    def height(self) -> int:
        cone = self.parent.cancellative.recession_cone
        return cone.cone_dim - self.face.dim

    def same_prime(self, other: "PrimeIdeal") -> bool:
        return self.face.ray_indices == other.face.ray_indices

    def contains_prime(self, other: "PrimeIdeal") -> bool:
        """other <= self as ideals (larger prime <-> smaller face)."""
        return set(self.face.ray_indices) <= set(other.face.ray_indices)

    def localize(self) -> tuple[PcMonoid, "object"]:
        return localize_pc(self.parent, self.face)

    def quotient(self) -> PcMonoid:
        """A/p: the face submonoid with ZERO adjoined."""
        canc = self.parent.cancellative
        gens = canc.face_generators(self.face)
        return PcMonoid(AffineMonoid(canc.ambient, gens), [])

    def __repr__(self):
        return f"PrimeIdeal(face_rays={self.face.ray_indices})"


def mspec(parent: PcMonoid) -> list[PrimeIdeal]:
    """All primes of the pc monoid, most generic first."""
    zero = MonoidIdeal(parent, ())
    faces = zero.avoiding_faces()
    faces.sort(key=lambda f: (-f.dim, f.ray_indices))
    return [PrimeIdeal(parent, f) for f in faces]


def intersect_primes(parent: PcMonoid, primes: list[PrimeIdeal]) -> MonoidIdeal:
    """Exact intersection of face primes: generated by sums of atoms
    over the hitting sets (one atom outside each face)."""
    if not primes:
        return MonoidIdeal(parent, ())
    canc = parent.cancellative
    cone = canc.recession_cone
    atoms = canc.atoms
    outside = [frozenset(i for i, a in enumerate(atoms)
                         if not cone.face_contains(p.face, a.free))
               for p in primes]
    if any(not s for s in outside):
        # a face containing every atom is the top face, so that prime is
        # the zero ideal and the whole intersection collapses to it
        return MonoidIdeal(parent, ())
    gens: list[GroupElement] = []
    n = len(atoms)
    for mask in range(1, 1 << n):
        chosen = [i for i in range(n) if mask >> i & 1]
        if all(any(i in s for i in chosen) for s in outside):
            total = atoms[chosen[0]]
            for i in chosen[1:]:
                total = total + atoms[i]
            gens.append(total)
    return MonoidIdeal(parent, gens)


def nil_ideal(parent: PcMonoid) -> MonoidIdeal:
    """The nilradical: radical of the zero ideal."""
    return MonoidIdeal(parent, ()).radical()


def reduced_monoid(parent: PcMonoid) -> PcMonoid:
    return PcMonoid(parent.cancellative, nil_ideal(parent).cgens)


# ---------------------------------------------------------------------------
# the free (monomial) engine, on plain exponent tuples

class _Exponents:
    """Coordinates of a free parent's elements over its atoms."""

    def __init__(self, parent: PcMonoid):
        from .lattice import IntMatrix
        canc = parent.cancellative
        self.canc = canc
        self.atoms = canc.atoms
        self.mat = IntMatrix.from_cols([a.free for a in self.atoms],
                                       rows=canc.ambient.rank)

    def of(self, el: GroupElement) -> Vec:
        x = solve(self.mat, el.free)
        if x is None or any(c < 0 for c in x):
            raise AssertionError("element is not a monomial in the atoms")
        return x

    def back(self, e: Vec) -> GroupElement:
        return self.canc.ambient.element(self.mat.matvec(e))


def _free_exponents(parent: PcMonoid) -> _Exponents | None:
    """Exponent translation when the cancellative part is free: sharp,
    torsion-free, with independent atoms.  A collapsed ideal is fine
    since all ideal computations happen upstairs anyway."""
    canc = parent.cancellative
    if canc.ambient.torsion or not canc.is_sharp():
        return None
    from .lattice import matrix_rank, IntMatrix
    atoms = canc.atoms
    if not atoms:
        return None
    m = IntMatrix.from_cols([a.free for a in atoms], rows=canc.ambient.rank)
    if matrix_rank(m) != len(atoms):
        return None
    return _Exponents(parent)


def _lcm_vec(a: Vec, b: Vec) -> Vec:
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a: Vec, b: Vec) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _min_gens(gens) -> frozenset:
    gens = set(gens)
    return frozenset(g for g in gens
                     if not any(h != g and _divides(h, g) for h in gens))


def _monomial_is_primary(gens: frozenset) -> bool:
    gens = _min_gens(gens)
    if not gens:
        return False  # the zero ideal of a free monoid is prime, not handled here
    d = len(next(iter(gens)))
    appearing = {i for g in gens for i in range(d) if g[i] > 0}
    for i in appearing:
        if not any(all(g[j] == 0 for j in range(d) if j != i) and g[i] > 0
                   for g in gens):
            return False
    return True


def _support(g: Vec) -> frozenset:
    return frozenset(i for i, c in enumerate(g) if c > 0)


@lru_cache(maxsize=200000)
def _split_rec(gens: frozenset, order: str) -> frozenset:
    """Set of primary components (each a frozenset of exponent gens)."""
    gens = _min_gens(gens)
    if _monomial_is_primary(gens):
        return frozenset([gens])
    d = len(next(iter(gens)))
    appearing = sorted({i for g in gens for i in range(d) if g[i] > 0})
    if order == "revlex":
        appearing = appearing[::-1]
    target = None
    for i in appearing:
        if not any(_support(g) == {i} for g in gens):
            target = i
            break
    key = (lambda g: g) if order == "lex" else (lambda g: tuple(reversed(g)))
    cands = sorted((g for g in gens if g[target] > 0 and len(_support(g)) >= 2),
                   key=key)
    g = cands[0]
    m1 = tuple(g[target] if j == target else 0 for j in range(d))
    m2 = tuple(0 if j == target else g[j] for j in range(d))
    left = _split_rec(gens | {m1}, order)
    right = _split_rec(gens | {m2}, order)
    return left | right


def _monomial_intersection(a: frozenset, b: frozenset) -> frozenset:
    return _min_gens(_lcm_vec(x, y) for x in a for y in b)


def _ideal_subset(a: frozenset, b: frozenset) -> bool:
    """Is the ideal generated by a contained in the one generated by b?"""
    return all(any(_divides(h, g) for h in b) for g in a)


def _monomial_decomposition(gens: frozenset, order: str = "lex") -> list[frozenset]:
    """Minimal primary decomposition of a monomial ideal: split, merge
    components sharing a radical, drop redundant ones."""
    gens = _min_gens(gens)
    if not gens:
        return []
    comps = list(_split_rec(gens, order))
    by_support: dict[frozenset, frozenset] = {}
    for c in comps:
        s = frozenset(i for g in c for i in _support(g))
        if s in by_support:
            by_support[s] = _monomial_intersection(by_support[s], c)
        else:
            by_support[s] = c
    comps = list(by_support.values())
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(comps):
            rest = comps[:i] + comps[i + 1:]
            if rest:
                inter = rest[0]
                for r in rest[1:]:
                    inter = _monomial_intersection(inter, r)
                if _ideal_subset(inter, c):
                    comps = rest
                    changed = True
                    break
    comps.sort(key=lambda c: (len({i for g in c for i in _support(g)}),
                              sorted(c)))
    return comps
