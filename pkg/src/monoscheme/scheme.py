"""Monoid schemes of finite type over the specialization poset.

A scheme is a finite poset of points together with a pc monoid stalk at
each point and a localization map to the stalk of every generization.
Construction validates that the minimal open U_x around each point
matches mspec of the stalk at x, that the maps compose, and that each
map presents the target stalk as the localization of the source at the
face cut out by the generization.

Constructors: mspec_scheme for affine schemes, from_fan for toric
schemes, glue for identification along open subschemes, product for
the pointwise smash product, and wedge for joining two schemes at
sharp closed points.  Variants: reduced, seminormalization (same
space), normalization (one point per minimal prime of each stalk),
and the decomposition of a reducible scheme into the closure of its
first generic point, the union of the rest, and their intersection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .cones import Face, RationalCone, hilbert_basis
from .ideals import MonoidIdeal, PrimeIdeal, intersect_primes, mspec, nil_ideal
from .lattice import (
    IntMatrix,
    Vec,
    in_span,
    is_zero_vec,
    primitive,
    vadd,
    vsub,
)
from .monoid import (
    ZERO,
    AffineMonoid,
    AmbientGroup,
    GroupHom,
    MonoidHom,
    PcMonoid,
    localize_pc,
    product_element,
    smash,
)
from .normalization import normalize, seminormalize


def _label_key(label):
    """A deterministic sort key for heterogeneous point labels."""
    if isinstance(label, frozenset):
        return ("s", tuple(sorted(_label_key(m) for m in label)))
    if isinstance(label, tuple):
        return ("t", tuple(_label_key(m) for m in label))
    return (type(label).__name__, label)


def _same_ghom(f: GroupHom, g: GroupHom) -> bool:
    """Do two group homomorphisms agree as maps (modulo the torsion
    relations of the target presentation)?"""
    if f.src != g.src or f.dst != g.dst:
        return False
    rels = f.dst.torsion_relation_cols()
    for j in range(f.matrix.cols):
        d = vsub(f.matrix.col(j), g.matrix.col(j))
        if not is_zero_vec(d) and not in_span(rels, d):
            return False
    return True


def _identity_hom(stalk: PcMonoid) -> MonoidHom:
    return MonoidHom(stalk, stalk, GroupHom.identity(stalk.ambient),
                     check=False)


def _same_quotient(a: PcMonoid, b: PcMonoid) -> bool:
    """Do two pc monoid presentations in one ambient group define the
    same quotient monoid (the same set of nonzero elements)?"""
    for s, t in ((a, b), (b, a)):
        for g in s.cancellative.gens:
            if s.is_zero(g):
                if t.cancellative.contains(g) and not t.is_zero(g):
                    return False
            elif not t.cancellative.contains(g) or t.is_zero(g):
                return False
        for h in s.ideal_gens:
            if t.cancellative.contains(h) and not t.is_zero(h):
                return False
    return True


def invert_ghom(gh: GroupHom) -> GroupHom:
    """The inverse of an isomorphism of ambient groups."""
    src, dst = gh.src, gh.dst
    cols = []
    for k in range(dst.pres_dim):
        e = tuple(1 if i == k else 0 for i in range(dst.pres_dim))
        pre = gh.preimage(dst.from_lift(e))
        if pre is None:
            raise ValueError("group map is not invertible")
        cols.append(src.lift(pre))
    inv = GroupHom(dst, src, IntMatrix.from_cols(cols, rows=src.pres_dim))
    for k in range(src.pres_dim):
        e = tuple(1 if i == k else 0 for i in range(src.pres_dim))
        el = src.from_lift(e)
        if inv.apply(gh.apply(el)).key() != el.key():
            raise ValueError("group map is not invertible")
    return inv


class MonoidScheme:
    """A finite-type monoid scheme: points, strict generizations,
    stalks, and localization maps toward the generic points."""

    def __init__(self, points, generizations, stalks, maps, validate=True):
        self.points = sorted(points, key=_label_key)
        self.gen = {x: frozenset(generizations.get(x, ())) for x in self.points}
        self.stalks = dict(stalks)
        self.maps = dict(maps)
        if validate:
            self._validate()

    # -- basic access -----------------------------------------------------

    def stalk(self, x) -> PcMonoid:
        return self.stalks[x]

    def U(self, x) -> frozenset:
        """The minimal open neighbourhood: x and its generizations."""
        return self.gen[x] | {x}

    def hom(self, x, y) -> MonoidHom:
        return _identity_hom(self.stalks[x]) if x == y else self.maps[(x, y)]

    def closure(self, x) -> frozenset:
        return frozenset(w for w in self.points if x in self.U(w))

    @cached_property
    def generic_points(self) -> list:
        return [x for x in self.points if not self.gen[x]]

    @cached_property
    def heights(self) -> dict:
        """Codimension of each point: longest generization chain above it."""
        out: dict = {}

        def h(x):
            if x not in out:
                out[x] = 1 + max((h(y) for y in self.gen[x]), default=-1)
            return out[x]

        for x in self.points:
            h(x)
        return out

    def height_one_points(self) -> list:
        return [x for x in self.points if self.heights[x] == 1]

    def dimension(self) -> int:
        return max(self.heights.values(), default=0)

    @cached_property
    def is_cancellative(self) -> bool:
        return all(s.is_cancellative for s in self.stalks.values())

    @cached_property
    def is_irreducible(self) -> bool:
        return len(self.generic_points) == 1

    @cached_property
    def is_connected(self) -> bool:
        if not self.points:
            return True
        seen = {self.points[0]}
        frontier = [self.points[0]]
        while frontier:
            x = frontier.pop()
            for y in self.points:
                if y not in seen and (y in self.gen[x] or x in self.gen[y]):
                    seen.add(y)
                    frontier.append(y)
        return len(seen) == len(self.points)

    def connected_components(self) -> list["MonoidScheme"]:
        remaining = set(self.points)
        comps = []
        while remaining:
            seed = min(remaining, key=_label_key)
            seen = {seed}
            frontier = [seed]
            while frontier:
                x = frontier.pop()
                for y in remaining:
                    if y not in seen and (y in self.gen[x] or x in self.gen[y]):
                        seen.add(y)
                        frontier.append(y)
            remaining -= seen
            comps.append(self.open_subscheme(seen))
        return comps

    @cached_property
    def is_separated(self) -> bool:
        """Every pairwise intersection of minimal opens is a minimal open
        whose stalk is generated by the images of the two stalks."""
        for x, y in combinations(self.points, 2):
            w = self.U(x) & self.U(y)
            if not w:
                continue
            bottoms = [z for z in w if w <= self.U(z)]
            if len(bottoms) != 1:
                return False
            z = bottoms[0]
            target = self.stalks[z].cancellative
            gens = []
            for s in (x, y):
                hom = self.hom(s, z)
                for g in self.stalks[s].cancellative.gens:
                    img = hom.apply(g)
                    if img is not ZERO:
                        gens.append(img)
            generated = AffineMonoid(target.ambient, gens)
            if not target.is_submonoid_of(generated):
                return False
        return True

    @cached_property
    def is_normal(self) -> bool:
        from .normalization import is_normal
        return all(s.is_cancellative and is_normal(s.cancellative)
                   for s in self.stalks.values())

    def open_subscheme(self, pts) -> "MonoidScheme":
        pts = frozenset(pts)
        for x in pts:
            if not self.gen[x] <= pts:
                raise ValueError("point set is not open (missing a generization)")
        return MonoidScheme(
            list(pts),
            {x: self.gen[x] for x in pts},
            {x: self.stalks[x] for x in pts},
            {e: h for e, h in self.maps.items() if e[0] in pts and e[1] in pts},
            validate=False)

    def __repr__(self):
        return f"MonoidScheme({len(self.points)} points)"

    # -- validation --------------------------------------------------------

    def _validate(self):
        pts = set(self.points)
        if len(pts) != len(self.points):
            raise ValueError("duplicate point labels")
        for x in self.points:
            g = self.gen[x]
            if not g <= pts:
                raise ValueError(f"generizations of {x!r} escape the point set")
            if x in g:
                raise ValueError(f"point {x!r} listed as its own generization")
            for y in g:
                if not self.gen[y] <= g:
                    raise ValueError(f"generizations not transitive at {x!r}")
                if (x, y) not in self.maps:
                    raise ValueError(f"missing localization map {x!r} -> {y!r}")
        for (x, y), hom in self.maps.items():
            if hom.src is not self.stalks[x] or hom.dst is not self.stalks[y]:
                raise ValueError(f"map {x!r} -> {y!r} joins the wrong stalks")
        for x in self.points:
            for y in self.gen[x]:
                for z in self.gen[y]:
                    direct = self.maps[(x, z)].ghom
                    through = self.maps[(y, z)].ghom.compose(self.maps[(x, y)].ghom)
                    if not _same_ghom(direct, through):
                        raise ValueError(
                            f"maps do not compose along {x!r} -> {y!r} -> {z!r}")
        for x in self.points:
            self._validate_local(x)

    def _validate_local(self, x):
        """U_x must match mspec of the stalk at x, with each map the
        localization at the matching face."""
        A = self.stalks[x]
        canc = A.cancellative
        cone = canc.recession_cone
        prime_faces = {p.face.ray_indices for p in mspec(A)}
        found: dict = {}
        for y in self.U(x):
            hom = self.hom(x, y)
            B = self.stalks[y]
            unit_flags = []
            total = (0,) * canc.ambient.rank
            for g in canc.gens:
                img = hom.apply(g)
                flag = img is not ZERO and B.cancellative.unit_group.contains(img)
                unit_flags.append(flag)
                if flag:
                    total = vadd(total, g.free)
            face = cone.face_of_vector(total)
            for g, flag in zip(canc.gens, unit_flags):
                if flag != cone.face_contains(face, g.free):
                    raise ValueError(
                        f"units pulled back from {y!r} do not cut a face of "
                        f"the stalk at {x!r}")
            if face.ray_indices not in prime_faces:
                raise ValueError(f"{y!r} does not match a prime of the stalk at {x!r}")
            if any(f.ray_indices == face.ray_indices for f in found.values()):
                raise ValueError(f"two points of U_{x!r} match one prime")
            found[y] = face
        if len(found) != len(prime_faces):
            raise ValueError(
                f"U_{x!r} has {len(found)} points but the stalk has "
                f"{len(prime_faces)} primes")
        for y in found:
            for z in found:
                if y == z:
                    continue
                ry, rz = set(found[y].ray_indices), set(found[z].ray_indices)
                if (z in self.gen[y]) != (ry < rz):
                    raise ValueError(
                        f"specialization order of {y!r}, {z!r} disagrees with "
                        f"the primes of the stalk at {x!r}")
        for y, face in found.items():
            if y == x:
                continue
            self._validate_localization(x, y, face)

    def _validate_localization(self, x, y, face):
        A, B = self.stalks[x], self.stalks[y]
        ghom = self.maps[(x, y)].ghom
        try:
            loc, _ = localize_pc(A, face)
        except ValueError as e:
            raise ValueError(f"stalk map {x!r} -> {y!r}: {e}") from None
        try:
            img_canc = AffineMonoid(
                B.ambient, [ghom.apply(g) for g in loc.cancellative.gens])
            img = PcMonoid(img_canc, [ghom.apply(g) for g in loc.ideal_gens])
        except ValueError as e:
            raise ValueError(
                f"stalk map {x!r} -> {y!r} does not carry the localization "
                f"into the target: {e}") from None
        if not img.same_pc_monoid(B) and not _same_quotient(img, B):
            raise ValueError(
                f"stalk at {y!r} is not the localization of the stalk at {x!r}")
        amb = A.ambient
        from .lattice import Subquotient
        rels = amb.torsion_relation_cols()
        sq = Subquotient(amb.pres_dim,
                         [amb.lift(g) for g in loc.cancellative.gens] + rels,
                         rels)
        if not ghom.is_injective_on(sq):
            raise ValueError(
                f"stalk map {x!r} -> {y!r} is not injective on the group")


# ---------------------------------------------------------------------------
# affine schemes

def mspec_scheme(pc: PcMonoid) -> MonoidScheme:
    """The scheme of primes of a pc monoid; point labels are the ray
    index tuples of the corresponding faces."""
    primes = mspec(pc)
    points = [p.face.ray_indices for p in primes]
    faces = {p.face.ray_indices: p.face for p in primes}
    stalks = {}
    for lab, face in faces.items():
        stalks[lab], _ = localize_pc(pc, face)
    gen = {}
    maps = {}
    for a in points:
        gen[a] = frozenset(b for b in points if set(a) < set(b))
        for b in gen[a]:
            maps[(a, b)] = MonoidHom(stalks[a], stalks[b],
                                     GroupHom.identity(pc.ambient), check=False)
    return MonoidScheme(points, gen, stalks, maps)


# ---------------------------------------------------------------------------
# fans and toric schemes

@dataclass(frozen=True)
class Fan:
    """A finite fan: primitive ray generators and cones given as
    frozensets of ray indices, closed under faces and intersecting in
    common faces."""

    rank: int
    rays: tuple
    cones: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        rays = tuple(tuple(r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        cones = frozenset(frozenset(c) for c in self.cones)
        if frozenset() not in cones:
            cones |= {frozenset()}
        object.__setattr__(self, "cones", cones)
        seen = set()
        for r in rays:
            if len(r) != self.rank:
                raise ValueError("ray of the wrong dimension")
            if is_zero_vec(r) or r != primitive(r):
                raise ValueError("rays must be primitive nonzero vectors")
            if r in seen:
                raise ValueError("duplicate ray")
            seen.add(r)
        used = set()
        for c in cones:
            used |= c
            if not c <= set(range(len(rays))):
                raise ValueError("cone uses an unknown ray index")
        if used != set(range(len(rays))):
            raise ValueError("unused ray")
        for c in cones:
            cone = self.cone_of(c)
            if not cone.is_pointed:
                raise ValueError("fan cones must be pointed")
            if len(cone.rays) != len(c):
                raise ValueError("cone generators are not all extreme")
            for f in self._face_sets(c):
                if f not in cones:
                    raise ValueError("fan is not closed under faces")
        for a, b in combinations(cones, 2):
            ca, cb = self.cone_of(a), self.cone_of(b)
            inter = ca.intersection(cb)
            if not (inter.is_face_of(ca) and inter.is_face_of(cb)):
                raise ValueError("cones do not intersect in a common face")

    def cone_of(self, c: frozenset) -> RationalCone:
        return RationalCone.from_generators([self.rays[i] for i in sorted(c)],
                                            self.rank)

    def _face_sets(self, c: frozenset) -> list:
        idx = sorted(c)
        cone = self.cone_of(c)
        return [frozenset(idx[i] for i in f.ray_indices) for f in cone.faces()]


def _dual_monoid(fan: Fan, c: frozenset) -> PcMonoid:
    """The monoid of lattice points of the dual cone of a fan cone."""
    amb = AmbientGroup(fan.rank, ())
    dual = RationalCone.from_constraints([fan.rays[i] for i in sorted(c)],
                                         [], fan.rank)
    gens = list(dual.rays)
    for b in dual.lineality_basis:
        gens += [b, tuple(-v for v in b)]
    units, atoms = hilbert_basis(gens, fan.rank)
    els = []
    for u in units:
        els += [amb.element(u), amb.element(tuple(-v for v in u))]
    els += [amb.element(a) for a in atoms]
    return PcMonoid(AffineMonoid(amb, els), [])


def from_fan(fan: Fan) -> MonoidScheme:
    """The toric monoid scheme of a fan; point labels are sorted ray
    index tuples of the cones."""
    amb = AmbientGroup(fan.rank, ())
    labels = {c: tuple(sorted(c)) for c in fan.cones}
    stalks = {labels[c]: _dual_monoid(fan, c) for c in fan.cones}
    gen = {}
    maps = {}
    for c in fan.cones:
        faces = set(fan._face_sets(c)) - {c}
        gen[labels[c]] = frozenset(labels[f] for f in faces)
        for f in faces:
            maps[(labels[c], labels[f])] = MonoidHom(
                stalks[labels[c]], stalks[labels[f]],
                GroupHom.identity(amb), check=False)
    return MonoidScheme(list(labels.values()), gen, stalks, maps)


def projective_fan(n: int) -> Fan:
    """The fan of projective n-space: rays e_1..e_n and -(e_1+...+e_n),
    with every proper subset of the rays spanning a cone."""
    if n < 1:
        raise ValueError("projective space needs n >= 1")
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [frozenset(c) for k in range(n + 1)
             for c in combinations(range(n + 1), k)]
    return Fan(n, tuple(rays), frozenset(cones))


def projective_space(n: int) -> MonoidScheme:
    """Projective n-space built by gluing its n+1 affine charts along
    the overlaps where a coordinate ratio is inverted."""
    if n < 1:
        raise ValueError("projective space needs n >= 1")
    amb = AmbientGroup(n, ())

    def u(i: int) -> Vec:
        return tuple(1 if j + 1 == i else 0 for j in range(n))

    charts = []
    chart_monoids = []
    for i in range(n + 1):
        gens = []
        for j in range(n + 1):
            if j != i:
                gens.append(amb.element(vsub(u(j), u(i))))
        pc = PcMonoid(AffineMonoid(amb, gens), [])
        chart_monoids.append(pc)
        charts.append(mspec_scheme(pc))
    idents = []
    for i, k in combinations(range(n + 1), 2):
        for x in charts[i].points:
            sx = charts[i].stalks[x]
            if not sx.cancellative.contains(amb.element(vsub(u(i), u(k)))):
                continue
            for y in charts[k].points:
                sy = charts[k].stalks[y]
                if sx.cancellative.same_submonoid(sy.cancellative):
                    idents.append((i, x, k, y, GroupHom.identity(amb)))
    return glue(charts, idents)


# ---------------------------------------------------------------------------
# gluing

def glue(pieces, identifications) -> MonoidScheme:
    """Glue schemes along identifications of points.

    Each identification (i, x, j, y, ghom) declares that point x of
    piece i equals point y of piece j, with ghom an isomorphism from
    the stalk at x onto the stalk at y.  Identifications must cover
    whole open overlaps; the validated result reports any mismatch.
    """
    tags = [(i, x) for i, p in enumerate(pieces) for x in p.points]
    parent = {t: t for t in tags}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    edges: dict = {}
    for (i, x, j, y, gh) in identifications:
        sa, sb = pieces[i].stalks[x], pieces[j].stalks[y]
        MonoidHom(sa, sb, gh)
        img = PcMonoid(
            AffineMonoid(sb.ambient, [gh.apply(g) for g in sa.cancellative.gens]),
            [gh.apply(g) for g in sa.ideal_gens])
        if not img.same_pc_monoid(sb):
            raise ValueError(
                f"identification of {(i, x)} with {(j, y)} is not an "
                f"isomorphism of stalks")
        inv = invert_ghom(gh)
        edges.setdefault((i, x), []).append(((j, y), gh))
        edges.setdefault((j, y), []).append(((i, x), inv))
        parent[find((i, x))] = find((j, y))

    classes: dict = {}
    for t in tags:
        classes.setdefault(find(t), []).append(t)
    reps = {}
    tau: dict = {}
    members: dict = {}
    for cls in classes.values():
        rep = min(cls, key=_label_key)
        label = frozenset(cls)
        for t in cls:
            reps[t] = label
        members[label] = (rep, cls)
        i, x = rep
        tau[rep] = GroupHom.identity(pieces[i].stalks[x].ambient)
        frontier = [rep]
        reached = {rep}
        while frontier:
            a = frontier.pop()
            for b, gh in edges.get(a, ()):
                composed = gh.compose(tau[a])
                if b in reached:
                    if not _same_ghom(composed, tau[b]):
                        raise ValueError(
                            f"identifications around {b} are inconsistent")
                else:
                    tau[b] = composed
                    reached.add(b)
                    frontier.append(b)

    points = list(members)
    stalks = {}
    tau_inv = {}
    for label, (rep, cls) in members.items():
        i, x = rep
        stalks[label] = pieces[i].stalks[x]
        for t in cls:
            tau_inv[t] = invert_ghom(tau[t]) if t != rep else tau[t]

    maps: dict = {}
    gen = {label: set() for label in points}
    for i, piece in enumerate(pieces):
        for x in piece.points:
            for y in piece.gen[x]:
                ca, cb = reps[(i, x)], reps[(i, y)]
                ghom = tau_inv[(i, y)].compose(
                    piece.maps[(x, y)].ghom.compose(tau[(i, x)]))
                if (ca, cb) in maps:
                    if not _same_ghom(maps[(ca, cb)].ghom, ghom):
                        raise ValueError(
                            f"overlap maps disagree on {ca} -> {cb}")
                else:
                    gen[ca].add(cb)
                    maps[(ca, cb)] = MonoidHom(stalks[ca], stalks[cb], ghom,
                                               check=False)
    changed = True
    while changed:
        changed = False
        for a in points:
            for b in list(gen[a]):
                for c in list(gen[b]):
                    if c == a:
                        raise ValueError("gluing creates a specialization loop")
                    ghom = maps[(b, c)].ghom.compose(maps[(a, b)].ghom)
                    if c not in gen[a]:
                        gen[a].add(c)
                        maps[(a, c)] = MonoidHom(stalks[a], stalks[c], ghom,
                                                 check=False)
                        changed = True
                    elif not _same_ghom(maps[(a, c)].ghom, ghom):
                        raise ValueError(f"overlap maps disagree on {a} -> {c}")
    return MonoidScheme(points, gen, stalks, maps)


def disjoint_union(pieces) -> MonoidScheme:
    return glue(pieces, [])


def glue_along_generic(pieces) -> MonoidScheme:
    """Glue irreducible schemes with equal generic stalks along their
    common generic point."""
    if not pieces:
        raise ValueError("nothing to glue")
    etas = []
    for p in pieces:
        if len(p.generic_points) != 1:
            raise ValueError("pieces must be irreducible")
        etas.append(p.generic_points[0])
    base = pieces[0].stalks[etas[0]]
    idents = []
    for i in range(1, len(pieces)):
        s = pieces[i].stalks[etas[i]]
        if s.ambient != base.ambient:
            raise ValueError("generic stalks live in different ambient groups")
        idents.append((0, etas[0], i, etas[i], GroupHom.identity(base.ambient)))
    return glue(pieces, idents)


# ---------------------------------------------------------------------------
# wedge at closed points

def wedge(xs: MonoidScheme, x, ys: MonoidScheme, y) -> MonoidScheme:
    """Join two schemes at closed points with sharp stalks.  The stalk
    at the joined point is the product monoid with each mixed sum of
    nonunit atoms collapsed to the basepoint."""
    for scheme, pt in ((xs, x), (ys, y)):
        if any(pt in scheme.gen[s] for s in scheme.points):
            raise ValueError("wedge points must be closed")
        if not scheme.stalks[pt].cancellative.is_sharp():
            raise ValueError("wedge needs sharp stalks at the joined points")
    sa, sb = xs.stalks[x], ys.stalks[y]
    amb = sa.ambient.product(sb.ambient)
    za, zb = sa.ambient.zero(), sb.ambient.zero()

    def emb_a(g):
        return product_element(amb, g, zb)

    def emb_b(g):
        return product_element(amb, za, g)

    canc = AffineMonoid(amb, [emb_a(g) for g in sa.cancellative.gens] +
                        [emb_b(g) for g in sb.cancellative.gens])
    ideal = [emb_a(g) for g in sa.ideal_gens] + \
        [emb_b(g) for g in sb.ideal_gens] + \
        [emb_a(a) + emb_b(b)
         for a in sa.cancellative.atoms for b in sb.cancellative.atoms]
    joint = PcMonoid(canc, ideal)
    cone = canc.recession_cone
    inc_a = GroupHom.coordinate_inclusion(sa.ambient, sb.ambient, first=True)
    inc_b = GroupHom.coordinate_inclusion(sa.ambient, sb.ambient, first=False)

    w = ("wedge", x, y)
    points = [w]
    gen: dict = {w: set()}
    stalks: dict = {w: joint}
    maps: dict = {}
    rebuilt: dict = {}

    for side, scheme, pt, emb, inc in (("l", xs, x, emb_a, inc_a),
                                       ("r", ys, y, emb_b, inc_b)):
        for p in scheme.gen[pt]:
            total = (0,) * amb.rank
            hom = scheme.maps[(pt, p)]
            for g in scheme.stalks[pt].cancellative.gens:
                img = hom.apply(g)
                if img is not ZERO and \
                        scheme.stalks[p].cancellative.unit_group.contains(img):
                    total = vadd(total, emb(g).free)
            face = cone.face_of_vector(total)
            loc, _ = localize_pc(joint, face)
            lab = (side, p)
            rebuilt[(side, p)] = loc
            points.append(lab)
            stalks[lab] = loc
            gen[w].add(lab)
            maps[(w, lab)] = MonoidHom(joint, loc, GroupHom.identity(amb),
                                       check=False)
        for p in scheme.points:
            if p == pt or (side, p) in rebuilt:
                continue
            lab = (side, p)
            points.append(lab)
            stalks[lab] = scheme.stalks[p]
        for p in scheme.points:
            if p == pt:
                continue
            lab = (side, p)
            gen.setdefault(lab, set())
            for q in scheme.gen[p]:
                qlab = (side, q)
                gen[lab].add(qlab)
                old = scheme.maps[(p, q)].ghom
                if (side, p) in rebuilt:
                    ghom = GroupHom.identity(amb)
                elif (side, q) in rebuilt:
                    ghom = inc.compose(old)
                else:
                    ghom = old
                maps[(lab, qlab)] = MonoidHom(stalks[lab], stalks[qlab],
                                              ghom, check=False)
    return MonoidScheme(points, gen, stalks, maps)


# ---------------------------------------------------------------------------
# products

def _product_ghom(f: GroupHom, g: GroupHom) -> GroupHom:
    """The product homomorphism on product ambient groups."""
    src = f.src.product(g.src)
    dst = f.dst.product(g.dst)
    rows = [[0] * src.pres_dim for _ in range(dst.pres_dim)]

    def place(mat, sr, dr, roff_free, roff_tors, coff_free, coff_tors):
        for r in range(mat.rows):
            for c in range(mat.cols):
                v = mat.entries[r][c]
                if v == 0:
                    continue
                rr = roff_free + r if r < dr else roff_tors + (r - dr)
                cc = coff_free + c if c < sr else coff_tors + (c - sr)
                rows[rr][cc] = v

    fa, fb = f.src.rank, g.src.rank
    da, db = f.dst.rank, g.dst.rank
    place(f.matrix, fa, da, 0, da + db, 0, fa + fb)
    place(g.matrix, fb, db, da, da + db + len(f.dst.torsion),
          fa, fa + fb + len(f.src.torsion))
    return GroupHom(src, dst, IntMatrix.from_rows(rows, cols=src.pres_dim))


def product(xs: MonoidScheme, ys: MonoidScheme) -> MonoidScheme:
    """The product scheme: poset product with smash product stalks."""
    points = []
    stalks = {}
    gen: dict = {}
    maps: dict = {}
    for x in xs.points:
        for y in ys.points:
            lab = (x, y)
            points.append(lab)
            stalks[lab], _, _ = smash(xs.stalks[x], ys.stalks[y])
    for x in xs.points:
        for y in ys.points:
            lab = (x, y)
            gen[lab] = set()
            for x2 in xs.U(x):
                for y2 in ys.U(y):
                    if (x2, y2) == lab:
                        continue
                    gen[lab].add((x2, y2))
                    ghom = _product_ghom(xs.hom(x, x2).ghom, ys.hom(y, y2).ghom)
                    maps[(lab, (x2, y2))] = MonoidHom(
                        stalks[lab], stalks[(x2, y2)], ghom, check=False)
    return MonoidScheme(points, gen, stalks, maps)


# ---------------------------------------------------------------------------
# scheme morphisms

@dataclass
class SchemeMap:
    """A morphism of schemes: a point map together with, for each
    source point, a monoid map from the stalk at the image point."""

    src: MonoidScheme
    dst: MonoidScheme
    point_map: dict
    stalk_maps: dict

    def __post_init__(self):
        for x in self.src.points:
            fx = self.point_map[x]
            hom = self.stalk_maps[x]
            if hom.src is not self.dst.stalks[fx] or \
                    hom.dst is not self.src.stalks[x]:
                raise ValueError(f"stalk map at {x!r} joins the wrong stalks")
            for y in self.src.gen[x]:
                if self.point_map[y] not in self.dst.U(fx):
                    raise ValueError("point map does not preserve generization")
        for x in self.src.points:
            for y in self.src.gen[x]:
                fx, fy = self.point_map[x], self.point_map[y]
                left = self.src.maps[(x, y)].ghom.compose(self.stalk_maps[x].ghom)
                right = self.stalk_maps[y].ghom.compose(
                    self.dst.hom(fx, fy).ghom)
                if not _same_ghom(left, right):
                    raise ValueError(
                        f"stalk maps at {x!r} -> {y!r} do not commute with "
                        f"localization")


def projection_map(prod: MonoidScheme, xs: MonoidScheme, ys: MonoidScheme,
                   first: bool = True) -> SchemeMap:
    """The projection of a product scheme onto a factor."""
    point_map = {}
    stalk_maps = {}
    for (x, y) in prod.points:
        lab = (x, y)
        point_map[lab] = x if first else y
        a, b = xs.stalks[x], ys.stalks[y]
        inc = GroupHom.coordinate_inclusion(a.ambient, b.ambient, first=first)
        stalk_maps[lab] = MonoidHom(a if first else b, prod.stalks[lab], inc,
                                    check=False)
    return SchemeMap(prod, xs if first else ys, point_map, stalk_maps)


# ---------------------------------------------------------------------------
# variants

def scheme_reduced(X: MonoidScheme) -> tuple[MonoidScheme, SchemeMap]:
    """The reduced scheme: each stalk modulo its nilradical."""
    stalks = {x: PcMonoid(X.stalks[x].cancellative,
                          nil_ideal(X.stalks[x]).cgens)
              for x in X.points}
    maps = {(a, b): MonoidHom(stalks[a], stalks[b], h.ghom, check=False)
            for (a, b), h in X.maps.items()}
    red = MonoidScheme(X.points, X.gen, stalks, maps)
    to_x = SchemeMap(red, X, {x: x for x in X.points},
                     {x: MonoidHom(X.stalks[x], stalks[x],
                                   GroupHom.identity(X.stalks[x].ambient),
                                   check=False)
                      for x in X.points})
    return red, to_x


def scheme_seminormalization(X: MonoidScheme) -> tuple[MonoidScheme, SchemeMap]:
    """The seminormalization: stalkwise seminormalization of the
    cancellative part with the same collapsed ideal; the point set and
    order are unchanged."""
    stalks = {}
    for x in X.points:
        A = X.stalks[x]
        stalks[x] = PcMonoid(seminormalize(A.cancellative), A.ideal_gens)
    maps = {(a, b): MonoidHom(stalks[a], stalks[b], h.ghom, check=False)
            for (a, b), h in X.maps.items()}
    sn = MonoidScheme(X.points, X.gen, stalks, maps)
    to_x = SchemeMap(sn, X, {x: x for x in X.points},
                     {x: MonoidHom(X.stalks[x], stalks[x],
                                   GroupHom.identity(X.stalks[x].ambient),
                                   check=False)
                      for x in X.points})
    return sn, to_x


def _pullback_face(hom: MonoidHom, prime: PrimeIdeal):
    """The face of the source stalk matching the preimage of a prime."""
    src = hom.src.cancellative
    cone = src.recession_cone
    total = (0,) * src.ambient.rank
    for g in src.gens:
        img = hom.apply(g)
        if img is not ZERO and not prime.contains(img):
            total = vadd(total, g.free)
    return cone.face_of_vector(total)


def scheme_normalization(X: MonoidScheme) -> tuple[MonoidScheme, SchemeMap]:
    """The normalization: one point for each minimal prime of each
    stalk, with the normalized quotient as stalk."""
    branch: dict = {}
    for x in X.points:
        branch[x] = MonoidIdeal(X.stalks[x], ()).minimal_primes()
    points = []
    stalks = {}
    point_over = {}
    for x in X.points:
        for i, p in enumerate(branch[x]):
            lab = (x, i)
            points.append(lab)
            point_over[lab] = (x, p)
            quot = p.quotient()
            stalks[lab] = PcMonoid(normalize(quot.cancellative), [])
    gen: dict = {lab: set() for lab in points}
    maps: dict = {}
    for (x, i) in points:
        p = branch[x][i]
        for y in X.gen[x]:
            hom = X.maps[(x, y)]
            for j, q in enumerate(branch[y]):
                face = _pullback_face(hom, q)
                if face.ray_indices == p.face.ray_indices:
                    gen[(x, i)].add((y, j))
                    maps[((x, i), (y, j))] = MonoidHom(
                        stalks[(x, i)], stalks[(y, j)], hom.ghom, check=False)
    nor = MonoidScheme(points, gen, stalks, maps)
    to_x = SchemeMap(
        nor, X, {lab: point_over[lab][0] for lab in points},
        {lab: MonoidHom(X.stalks[point_over[lab][0]], stalks[lab],
                        GroupHom.identity(stalks[lab].ambient), check=False)
         for lab in points})
    return nor, to_x


@dataclass
class ComponentsDecomposition:
    """The closure of the first generic point, the union of the closures
    of the others, and their intersection, with the closed immersions."""

    first: MonoidScheme
    rest: MonoidScheme
    overlap: MonoidScheme
    first_map: SchemeMap
    rest_map: SchemeMap
    overlap_map: SchemeMap


def components_decomposition(X: MonoidScheme) -> ComponentsDecomposition:
    etas = X.generic_points
    if len(etas) < 2:
        raise ValueError("scheme is irreducible; nothing to decompose")
    eta1, rest_etas = etas[0], etas[1:]

    def closed_piece(keep_etas):
        pts = [x for x in X.points if any(e in X.U(x) for e in keep_etas)]
        stalks = {}
        for x in pts:
            primes = [p for p in mspec(X.stalks[x])
                      if p.face.ray_indices in
                      {self_face(x, e) for e in keep_etas if e in X.U(x)}]
            ideal = intersect_primes(X.stalks[x], primes)
            stalks[x] = PcMonoid(X.stalks[x].cancellative, ideal.cgens)
        maps = {(a, b): MonoidHom(stalks[a], stalks[b], X.maps[(a, b)].ghom,
                                  check=False)
                for (a, b) in X.maps if a in pts and b in pts}
        piece = MonoidScheme(pts, {x: X.gen[x] & frozenset(pts) for x in pts},
                             stalks, maps)
        imm = SchemeMap(piece, X, {x: x for x in pts},
                        {x: MonoidHom(X.stalks[x], stalks[x],
                                      GroupHom.identity(X.stalks[x].ambient),
                                      check=False)
                         for x in pts})
        return piece, imm

    face_memo: dict = {}

    def self_face(x, e):
        if (x, e) not in face_memo:
            seen = _pullback_face(X.hom(x, e),
                                  mspec(X.stalks[e])[0])
            face_memo[(x, e)] = seen.ray_indices
        return face_memo[(x, e)]

    first, fmap = closed_piece([eta1])
    rest, rmap = closed_piece(rest_etas)
    both = [x for x in first.points if x in set(rest.points)]
    stalks = {}
    for x in both:
        f1 = self_face(x, eta1)
        face = next(p.face for p in mspec(X.stalks[x])
                    if p.face.ray_indices == f1)
        canc = AffineMonoid(X.stalks[x].ambient,
                            X.stalks[x].cancellative.face_generators(face))
        cone = X.stalks[x].cancellative.recession_cone
        ideal = [g for g in rest.stalks[x].ideal_gens
                 if cone.face_contains(face, g.free)]
        stalks[x] = PcMonoid(canc, ideal)
    maps = {(a, b): MonoidHom(stalks[a], stalks[b], X.maps[(a, b)].ghom,
                              check=False)
            for (a, b) in X.maps if a in set(both) and b in set(both)}
    overlap = MonoidScheme(both, {x: X.gen[x] & frozenset(both) for x in both},
                           stalks, maps)
    omap = SchemeMap(overlap, X, {x: x for x in both},
                     {x: MonoidHom(X.stalks[x], stalks[x],
                                   GroupHom.identity(X.stalks[x].ambient),
                                   check=False)
                      for x in both})
    return ComponentsDecomposition(first, rest, overlap, fmap, rmap, omap)


# ---------------------------------------------------------------------------
# isomorphism testing

def _nonzero_presentation(pc: PcMonoid) -> PcMonoid:
    """Re-present a pc monoid on its nonzero generators, so that two
    presentations of one quotient become comparable."""
    keep = [g for g in pc.cancellative.gens if not pc.is_zero(g)]
    canc = AffineMonoid(pc.ambient, keep)
    ideal = [h for h in pc.ideal_gens if canc.contains(h)]
    out = PcMonoid(canc, ideal)
    if not _same_quotient(out, pc):
        raise ValueError("stalk presentation cannot be reduced")
    return out


def _stalk_invariant(pc: PcMonoid):
    canc = pc.cancellative
    dims = sorted(p.face.dim for p in mspec(pc))
    units = canc.unit_group.group()
    return (dims[-1] - dims[0] if dims else 0,
            canc.recession_cone.lineality_dim,
            len([a for a in canc.atoms if not pc.is_zero(a)]),
            len(MonoidIdeal(pc, ()).minimal_primes()),
            units.rank,
            units.invariant_factors)


def _stalk_iso_candidates(a: PcMonoid, b: PcMonoid):
    """Candidate group isomorphisms carrying the first stalk onto the
    second.  Tries the identity, then (for sharp torsion-free stalks
    of full rank) all atom matchings."""
    if a.ambient == b.ambient and _same_quotient(a, b):
        yield GroupHom.identity(a.ambient)
    ca, cb = a.cancellative, b.cancellative
    if (ca.ambient.torsion or cb.ambient.torsion
            or not ca.is_sharp() or not cb.is_sharp()):
        return
    if ca.ambient.rank != cb.ambient.rank:
        return
    from .lattice import matrix_rank, solve
    atoms_a, atoms_b = ca.atoms, cb.atoms
    if len(atoms_a) != len(atoms_b):
        return
    basis_idx = []
    m = None
    for i, g in enumerate(atoms_a):
        cand = basis_idx + [i]
        mat = IntMatrix.from_cols([atoms_a[j].free for j in cand],
                                  rows=ca.ambient.rank)
        if matrix_rank(mat) == len(cand):
            basis_idx = cand
            m = mat
        if len(basis_idx) == ca.ambient.rank:
            break
    if m is None or len(basis_idx) < ca.ambient.rank:
        return

    def assignments(k, used):
        if k == len(basis_idx):
            yield []
            return
        for j in range(len(atoms_b)):
            if j not in used:
                for rest in assignments(k + 1, used | {j}):
                    yield [j] + rest

    seen = set()
    for assign in assignments(0, frozenset()):
        target = IntMatrix.from_cols([atoms_b[j].free for j in assign],
                                     rows=cb.ambient.rank)
        rows = []
        ok = True
        for r in range(cb.ambient.rank):
            sol = solve(m.transpose(), target.transpose().col(r))
            if sol is None:
                ok = False
                break
            rows.append(sol)
        if not ok:
            continue
        mat = IntMatrix.from_rows(rows, cols=ca.ambient.rank)
        if mat.entries in seen:
            continue
        seen.add(mat.entries)
        gh = GroupHom(ca.ambient, cb.ambient, mat)
        try:
            MonoidHom(a, b, gh)
        except ValueError:
            continue
        img = PcMonoid(AffineMonoid(cb.ambient,
                                    [gh.apply(g) for g in ca.gens]),
                       [gh.apply(g) for g in a.ideal_gens])
        if _same_quotient(img, b):
            yield gh


def _reduced_copy(X: MonoidScheme) -> MonoidScheme:
    """Rewrite a scheme with each stalk presented on its nonzero
    generators inside its own group, so differently embedded and
    differently presented stalks become comparable."""
    from .lattice import lattice_basis, solve
    nz = {x: _nonzero_presentation(X.stalks[x]) for x in X.points}
    if any(s.ambient.torsion for s in nz.values()):
        maps = {(x, y): MonoidHom(nz[x], nz[y], hom.ghom, check=False)
                for (x, y), hom in X.maps.items()}
        return MonoidScheme(X.points, X.gen, nz, maps, validate=False)
    basis = {}
    ambs = {}
    stalks = {}
    for x in X.points:
        A = nz[x]
        b = lattice_basis([g.free for g in A.cancellative.gens])
        basis[x] = IntMatrix.from_cols(b, rows=A.ambient.rank)
        amb = AmbientGroup(len(b), ())
        ambs[x] = amb

        def red(el, x=x, amb=amb):
            c = solve(basis[x], el.free)
            if c is None:
                raise ValueError("element escapes the group of the stalk")
            return amb.element(c)

        stalks[x] = PcMonoid(
            AffineMonoid(amb, [red(g) for g in A.cancellative.gens]),
            [red(g) for g in A.ideal_gens])
    maps = {}
    for (x, y), hom in X.maps.items():
        cols = []
        for i in range(ambs[x].rank):
            img = hom.ghom.matrix.matvec(basis[x].col(i))
            c = solve(basis[y], img)
            if c is None:
                raise ValueError("stalk map escapes the group of the target")
            cols.append(c)
        gh = GroupHom(ambs[x], ambs[y],
                      IntMatrix.from_cols(cols, rows=ambs[y].rank))
        maps[(x, y)] = MonoidHom(stalks[x], stalks[y], gh, check=False)
    return MonoidScheme(X.points, X.gen, stalks, maps, validate=False)


def _carries_onto(gh: GroupHom, a: PcMonoid, b: PcMonoid) -> bool:
    try:
        MonoidHom(a, b, gh)
        img = PcMonoid(
            AffineMonoid(b.ambient, [gh.apply(g) for g in a.cancellative.gens]),
            [gh.apply(g) for g in a.ideal_gens])
    except ValueError:
        return False
    return _same_quotient(img, b)


def _component_isomorphic(X: MonoidScheme, Y: MonoidScheme,
                          inv_x: dict, inv_y: dict) -> bool:
    """Isomorphism search on connected schemes: pick candidate stalk
    isomorphisms at an anchor point and propagate through the
    localization maps, which identify the groups of all stalks."""
    anchors = [x for x in X.points
               if X.stalks[x].cancellative.is_sharp()] or X.points
    a = min(anchors, key=lambda x: (len(X.stalks[x].cancellative.atoms),
                                    _label_key(x)))
    neighbours = {x: set() for x in X.points}
    for x in X.points:
        for y in X.gen[x]:
            neighbours[x].add(y)
            neighbours[y].add(x)
    order = []
    via = {}
    seen = {a}
    frontier = [a]
    while frontier:
        x = frontier.pop(0)
        order.append(x)
        for z in sorted(neighbours[x], key=_label_key):
            if z not in seen:
                seen.add(z)
                via[z] = x
                frontier.append(z)

    def extend(k, assigned, isos):
        if k == len(order):
            for x in X.points:
                for z in X.gen[x]:
                    left = isos[z].compose(X.maps[(x, z)].ghom)
                    right = Y.maps[(assigned[x], assigned[z])].ghom.compose(
                        isos[x])
                    if not _same_ghom(left, right):
                        return False
            return True
        x = order[k]
        if k == 0:
            pool = [(y, gh) for y in Y.points if inv_x[x] == inv_y[y]
                    for gh in _stalk_iso_candidates(X.stalks[x], Y.stalks[y])]
        else:
            w = via[x]
            fw = assigned[w]
            pool = []
            try:
                if x in X.gen[w]:
                    inv = invert_ghom(X.maps[(w, x)].ghom)
                    for fy in Y.gen[fw]:
                        gh = Y.maps[(fw, fy)].ghom.compose(isos[w]).compose(inv)
                        pool.append((fy, gh))
                else:
                    for fy in (y for y in Y.points if fw in Y.gen[y]):
                        gh = invert_ghom(Y.maps[(fy, fw)].ghom).compose(
                            isos[w]).compose(X.maps[(x, w)].ghom)
                        pool.append((fy, gh))
            except ValueError:
                return False
        for fy, gh in pool:
            if fy in assigned.values() or inv_x[x] != inv_y[fy]:
                continue
            if any((x2 in X.gen[x]) != (y2 in Y.gen[fy]) or
                   (x in X.gen[x2]) != (fy in Y.gen[y2])
                   for x2, y2 in assigned.items()):
                continue
            if not _carries_onto(gh, X.stalks[x], Y.stalks[fy]):
                continue
            assigned[x] = fy
            isos[x] = gh
            if extend(k + 1, assigned, isos):
                return True
            del assigned[x]
            del isos[x]
        return False

    return extend(0, {}, {})


def scheme_isomorphic(X: MonoidScheme, Y: MonoidScheme) -> bool:
    """Search for an isomorphism: a poset bijection with compatible
    stalk isomorphisms."""
    if len(X.points) != len(Y.points):
        return False
    X, Y = _reduced_copy(X), _reduced_copy(Y)
    inv_x = {x: (_stalk_invariant(X.stalks[x]), len(X.gen[x]), X.heights[x])
             for x in X.points}
    inv_y = {y: (_stalk_invariant(Y.stalks[y]), len(Y.gen[y]), Y.heights[y])
             for y in Y.points}
    if sorted(inv_x.values()) != sorted(inv_y.values()):
        return False
    comps_x = X.connected_components()
    comps_y = Y.connected_components()
    if len(comps_x) != len(comps_y):
        return False

    used = [False] * len(comps_y)

    def match(i):
        if i == len(comps_x):
            return True
        cx = comps_x[i]
        for j, cy in enumerate(comps_y):
            if used[j] or len(cx.points) != len(cy.points):
                continue
            ix = {x: (_stalk_invariant(cx.stalks[x]), len(cx.gen[x]),
                      cx.heights[x]) for x in cx.points}
            iy = {y: (_stalk_invariant(cy.stalks[y]), len(cy.gen[y]),
                      cy.heights[y]) for y in cy.points}
            if sorted(ix.values()) != sorted(iy.values()):
                continue
            if _component_isomorphic(cx, cy, ix, iy):
                used[j] = True
                if match(i + 1):
                    return True
                used[j] = False
        return False

    return match(0)
