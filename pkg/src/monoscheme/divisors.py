"""Sheaves of abelian groups on the specialization poset of a monoid
scheme, their cohomology, and the divisor-class invariants built from
them.

A sheaf here is a functor on the poset: a finitely presented abelian
group F(x) at each point and a map F(x) -> F(y) whenever y is a
generization of x.  Cochains live on strictly increasing specialization
chains x_0 < ... < x_p with coefficients in F(x_p); the differential
alternates over dropped points and pushes the coefficient forward when
the most generic point is dropped.  H^0 is the group of compatible
families, and H^1 of the units sheaf is the Picard group.

On top of the cohomology engine sit the Weil divisor class group of a
normal scheme (cokernel of the valuation matrix on the generic units),
the Cartier divisor group (global sections of the constant sheaf of the
generic units modulo stalk units), the six-term exact sequence
comparing a seminormal scheme with its normalization, and the
Mayer-Vietoris sequence splitting a reducible scheme into the closure
of one generic point and the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import (
    Hom,
    IntMatrix,
    PresentedAbGroup,
    Subquotient,
    _snf,
    exact_at,
    in_span,
    kernel_basis,
    solve,
    vadd,
    vscale,
)
from .monoid import AffineMonoid, GroupElement, PcMonoid, UnitGroup
from .normalization import (
    class_group_of_affine,
    dv_structure,
    is_normal,
    normalize,
    is_seminormal,
)
from .scheme import (
    MonoidScheme,
    SchemeMap,
    _label_key,
    components_decomposition,
)


def _mat_from_cols(cols, rows: int) -> IntMatrix:
    if cols:
        return IntMatrix.from_cols(cols, rows=rows)
    return IntMatrix(rows, 0, tuple(() for _ in range(rows)))


def _mat_from_rows(rows, cols: int) -> IntMatrix:
    if rows:
        return IntMatrix.from_rows(rows, cols=cols)
    return IntMatrix(0, cols, ())


def _unit_relations(units: UnitGroup) -> list[tuple]:
    """Relations among the unit generators: integer combinations that
    vanish in the ambient group."""
    k = len(units.gens)
    n = units.ambient.pres_dim
    if k == 0:
        return []
    if n == 0:
        return [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]
    cols = [units.ambient.lift(g) for g in units.gens]
    cols += list(units.ambient.torsion_relation_cols())
    ker = kernel_basis(IntMatrix.from_cols(cols, rows=n))
    return [tuple(v[:k]) for v in ker]


class PosetSheaf:
    """A presented sheaf on the specialization poset of a scheme.

    ``ngens[x]`` generators and relation vectors ``rels[x]`` present the
    group at x; ``maps[(x, y)]`` is the restriction matrix toward each
    generization y of x.  Restrictions must carry relations into
    relations and compose functorially modulo relations."""

    def __init__(self, scheme: MonoidScheme, ngens: dict, rels: dict,
                 maps: dict, validate: bool = True):
        self.scheme = scheme
        self.ngens = {x: int(ngens[x]) for x in scheme.points}
        self.rels = {x: [tuple(r) for r in rels.get(x, ())]
                     for x in scheme.points}
        self.maps = dict(maps)
        if validate:
            self._validate()

    def map(self, x, y) -> IntMatrix:
        if x == y:
            return IntMatrix.identity(self.ngens[x])
        return self.maps[(x, y)]

    def stalk_sq(self, x) -> Subquotient:
        return Subquotient(self.ngens[x], None, self.rels[x])

    def stalk_group(self, x) -> PresentedAbGroup:
        return self.stalk_sq(x).group()

    def _validate(self):
        X = self.scheme
        for x in X.points:
            for r in self.rels[x]:
                if len(r) != self.ngens[x]:
                    raise ValueError("relation of the wrong length")
            for y in X.gen[x]:
                m = self.maps.get((x, y))
                if m is None or m.rows != self.ngens[y] or \
                        m.cols != self.ngens[x]:
                    raise ValueError(f"missing or misshapen map {x!r}->{y!r}")
                for r in self.rels[x]:
                    if not self._is_rel(y, m.matvec(r)):
                        raise ValueError(
                            f"map {x!r}->{y!r} does not preserve relations")
        for x in X.points:
            for y in X.gen[x]:
                for z in X.gen[y]:
                    left = self.maps[(y, z)].matmul(self.maps[(x, y)])
                    right = self.maps[(x, z)]
                    for j in range(left.cols):
                        diff = tuple(left.entries[i][j] - right.entries[i][j]
                                     for i in range(left.rows))
                        if not self._is_rel(z, diff):
                            raise ValueError(
                                f"restrictions {x!r}->{y!r}->{z!r} are not "
                                f"functorial")

    def _is_rel(self, x, v) -> bool:
        rels = self.rels[x]
        if not rels:
            return all(c == 0 for c in v)
        return in_span(rels, tuple(v))


def _unit_groups_sheaf(X: MonoidScheme, units: dict) -> PosetSheaf:
    """The sheaf whose group at x is the given unit group, restricted
    along the localization maps of the scheme."""
    ngens = {x: len(units[x].gens) for x in X.points}
    rels = {x: _unit_relations(units[x]) for x in X.points}
    maps = {}
    for x in X.points:
        for y in X.gen[x]:
            gh = X.maps[(x, y)].ghom
            cols = []
            for u in units[x].gens:
                c = units[y].express(gh.apply(u))
                if c is None:
                    raise ValueError(
                        f"localization {x!r}->{y!r} does not carry units to "
                        f"units")
                cols.append(c)
            maps[(x, y)] = _mat_from_cols(cols, rows=ngens[y])
    return PosetSheaf(X, ngens, rels, maps)


def units_sheaf(X: MonoidScheme) -> PosetSheaf:
    """The sheaf of unit groups of the stalks."""
    return _unit_groups_sheaf(X, {x: X.stalks[x].unit_group
                                  for x in X.points})


def _reduce_sheaf(F: PosetSheaf):
    """An isomorphic sheaf with every stalk presented minimally: the
    relations are put in Smith form and the coordinates with invariant
    factor one are dropped.  Returns the sheaf together with the
    per-point change matrices (old coordinates -> new and back)."""
    X = F.scheme
    ngens, rels, to_new, to_old = {}, {}, {}, {}
    for x in X.points:
        n = F.ngens[x]
        rl = F.rels[x]
        if not rl or n == 0:
            ngens[x] = n
            rels[x] = []
            to_new[x] = IntMatrix.identity(n)
            to_old[x] = IntMatrix.identity(n)
            continue
        s = _snf(IntMatrix.from_cols(rl, rows=n))
        diag = s.diagonal
        kept = [i for i in range(n)
                if i >= len(diag) or diag[i] != 1]
        to_new[x] = _mat_from_rows([s.U.entries[i] for i in kept], n)
        to_old[x] = _mat_from_cols([s.Uinv.col(i) for i in kept], rows=n)
        ngens[x] = len(kept)
        rels[x] = [tuple(diag[i] if k == j else 0
                         for k in range(len(kept)))
                   for j, i in enumerate(kept)
                   if i < len(diag) and diag[i] > 1]
    maps = {k: to_new[k[1]].matmul(m).matmul(to_old[k[0]])
            for k, m in F.maps.items()}
    return PosetSheaf(X, ngens, rels, maps), to_new, to_old


def _chain_key(chain):
    return tuple(_label_key(x) for x in chain)


class CochainComplex:
    """Cochains on strictly increasing specialization chains with
    coefficients in the sheaf group at the most generic chain point."""

    def __init__(self, sheaf: PosetSheaf, top: int = 2):
        X = sheaf.scheme
        self.sheaf = sheaf
        self.chains: list[list[tuple]] = [[(x,) for x in X.points]]
        for _ in range(top):
            nxt = []
            for c in self.chains[-1]:
                for y in X.gen[c[-1]]:
                    nxt.append(c + (y,))
            self.chains.append(sorted(nxt, key=_chain_key))
        self.offset: list[dict] = []
        self.dim: list[int] = []
        for chains in self.chains:
            off = {}
            d = 0
            for c in chains:
                off[c] = d
                d += sheaf.ngens[c[-1]]
            self.offset.append(off)
            self.dim.append(d)
        self._sq: dict[int, Subquotient] = {}
        self._d: dict[int, Hom] = {}
        self._h: dict[int, Subquotient] = {}

    def _embedded_rels(self, p: int) -> list[tuple]:
        out = []
        for c in self.chains[p]:
            base = self.offset[p][c]
            for r in self.sheaf.rels[c[-1]]:
                v = [0] * self.dim[p]
                v[base:base + len(r)] = r
                out.append(tuple(v))
        return out

    def cochain_sq(self, p: int) -> Subquotient:
        if p not in self._sq:
            self._sq[p] = Subquotient(self.dim[p], None,
                                      self._embedded_rels(p))
        return self._sq[p]

    def d(self, p: int) -> Hom:
        if p not in self._d:
            rows = [[0] * self.dim[p] for _ in range(self.dim[p + 1])]
            for c2 in self.chains[p + 1]:
                r0 = self.offset[p + 1][c2]
                n2 = self.sheaf.ngens[c2[-1]]
                for i in range(p + 1):
                    c1 = c2[:i] + c2[i + 1:]
                    sign = -1 if i % 2 else 1
                    c0 = self.offset[p][c1]
                    for k in range(n2):
                        rows[r0 + k][c0 + k] += sign
                c1 = c2[:-1]
                sign = -1 if (p + 1) % 2 else 1
                m = self.sheaf.map(c2[-2], c2[-1])
                c0 = self.offset[p][c1]
                for k in range(n2):
                    for j in range(m.cols):
                        rows[r0 + k][c0 + j] += sign * m.entries[k][j]
            carrier = _mat_from_rows([tuple(r) for r in rows], self.dim[p])
            self._d[p] = Hom(self.cochain_sq(p), self.cochain_sq(p + 1),
                             carrier)
        return self._d[p]

    def h_sq(self, p: int) -> Subquotient:
        """H^p as a subquotient of the degree-p cochain space."""
        if p not in self._h:
            numerator = self.d(p).kernel_gens()
            denominator = list(self._embedded_rels(p))
            if p > 0:
                denominator += [tuple(col) for col in self.d(p - 1).matrix]
            self._h[p] = Subquotient(self.dim[p], numerator, denominator)
        return self._h[p]

    def h_group(self, p: int) -> PresentedAbGroup:
        return self.h_sq(p).group()


def picard_group(X: MonoidScheme) -> PresentedAbGroup:
    """H^1 of the sheaf of units: isomorphism classes of invertible
    sheaves."""
    return CochainComplex(_reduce_sheaf(units_sheaf(X))[0]).h_group(1)


def global_units_group(X: MonoidScheme) -> PresentedAbGroup:
    """H^0 of the sheaf of units: the unit group of the sections."""
    return CochainComplex(_reduce_sheaf(units_sheaf(X))[0]).h_group(0)


# ---------------------------------------------------------------------------
# the six-term sequence of a short exact sequence of sheaves

@dataclass
class SixTermReport:
    """0 -> H0(F1) -> H0(F2) -> H0(F3) -> H1(F1) -> H1(F2) -> H1(F3),
    with exactness checked at every joint the sequence claims."""

    terms: list[PresentedAbGroup]
    maps: list[Hom]
    injective_start: bool
    exact_joints: list[bool]
    surjective_end: bool
    complexes: tuple    # the three cochain complexes, for further maps
    reductions: tuple   # per sheaf, the (to_new, to_old) change matrices

    @property
    def exact(self) -> bool:
        return self.injective_start and all(self.exact_joints)


def _block_diagonal(K_src: CochainComplex, K_dst: CochainComplex,
                    per_point: dict, p: int) -> IntMatrix:
    rows = [[0] * K_src.dim[p] for _ in range(K_dst.dim[p])]
    for c in K_src.chains[p]:
        m = per_point[c[-1]]
        r0 = K_dst.offset[p][c]
        c0 = K_src.offset[p][c]
        for i in range(m.rows):
            for j in range(m.cols):
                rows[r0 + i][c0 + j] = m.entries[i][j]
    return _mat_from_rows([tuple(r) for r in rows], K_src.dim[p])


def _section_matrix(pi: IntMatrix, rels3: list[tuple]) -> IntMatrix:
    """A right inverse of a surjection modulo the target relations."""
    n3, n2 = pi.rows, pi.cols
    aug = _mat_from_cols([pi.col(j) for j in range(n2)] + list(rels3),
                         rows=n3)
    cols = []
    for k in range(n3):
        e = tuple(1 if i == k else 0 for i in range(n3))
        sol = solve(aug, e)
        if sol is None:
            raise ValueError("quotient presentation map has no section")
        cols.append(sol[:n2])
    return _mat_from_cols(cols, rows=n2)


def _connecting_hom(K1: CochainComplex, K2: CochainComplex,
                    K3: CochainComplex, iota: dict, pi: dict) -> Hom:
    """H0(F3) -> H1(F1): lift a compatible family through the quotient,
    apply the differential, and pull the result back along the
    inclusion."""
    X = K1.sheaf.scheme
    sigma = {x: _section_matrix(pi[x], K3.sheaf.rels[x]) for x in X.points}
    src = K3.h_sq(0)
    dst = K1.h_sq(1)
    d0 = K2.d(0)
    images = []
    for b in src.basis:
        lift = [0] * K2.dim[0]
        for x in X.points:
            o3 = K3.offset[0][(x,)]
            seg = b[o3:o3 + K3.sheaf.ngens[x]]
            img = sigma[x].matvec(seg)
            o2 = K2.offset[0][(x,)]
            lift[o2:o2 + len(img)] = img
        edge = d0.carrier.matvec(tuple(lift))
        w = [0] * K1.dim[1]
        for c in K1.chains[1]:
            y = c[-1]
            o2 = K2.offset[1][c]
            seg = edge[o2:o2 + K2.sheaf.ngens[y]]
            n1 = K1.sheaf.ngens[y]
            aug = _mat_from_cols(
                [iota[y].col(j) for j in range(n1)] + list(K2.sheaf.rels[y]),
                rows=K2.sheaf.ngens[y])
            sol = solve(aug, seg)
            if sol is None:
                raise ValueError("connecting map escaped the image of the "
                                 "inclusion")
            o1 = K1.offset[1][c]
            w[o1:o1 + n1] = sol[:n1]
        coords = dst.coords(tuple(w))
        if coords is None:
            raise ValueError("connecting map produced a non-cocycle")
        images.append(coords)
    return Hom.from_images(src, dst, images)


def les_of_sheaf_ses(F1: PosetSheaf, F2: PosetSheaf, F3: PosetSheaf,
                     iota: dict, pi: dict) -> SixTermReport:
    """The six-term cohomology sequence of a stalkwise short exact
    sequence of sheaves 0 -> F1 -> F2 -> F3 -> 0 on one scheme."""
    X = F1.scheme
    if F2.scheme is not X or F3.scheme is not X:
        raise ValueError("the three sheaves must live on one scheme")
    for x in X.points:
        s1, s2, s3 = F1.stalk_sq(x), F2.stalk_sq(x), F3.stalk_sq(x)
        ih = Hom(s1, s2, iota[x])
        ph = Hom(s2, s3, pi[x])
        if not ih.is_injective():
            raise ValueError(f"inclusion is not injective at {x!r}")
        if not ph.is_surjective():
            raise ValueError(f"projection is not surjective at {x!r}")
        if not exact_at(ih, ph):
            raise ValueError(f"sequence is not exact at {x!r}")
    for (x, y), m1 in F1.maps.items():
        left = F2.maps[(x, y)].matmul(iota[x])
        right = iota[y].matmul(m1)
        for j in range(left.cols):
            diff = tuple(left.entries[i][j] - right.entries[i][j]
                         for i in range(left.rows))
            if not F2._is_rel(y, diff):
                raise ValueError("inclusion is not a sheaf map")
        left = F3.maps[(x, y)].matmul(pi[x])
        right = pi[y].matmul(F2.maps[(x, y)])
        for j in range(left.cols):
            diff = tuple(left.entries[i][j] - right.entries[i][j]
                         for i in range(left.rows))
            if not F3._is_rel(y, diff):
                raise ValueError("projection is not a sheaf map")
    R1, new1, old1 = _reduce_sheaf(F1)
    R2, new2, old2 = _reduce_sheaf(F2)
    R3, new3, old3 = _reduce_sheaf(F3)
    iota = {x: new2[x].matmul(iota[x]).matmul(old1[x]) for x in X.points}
    pi = {x: new3[x].matmul(pi[x]).matmul(old2[x]) for x in X.points}
    K1, K2, K3 = CochainComplex(R1), CochainComplex(R2), CochainComplex(R3)
    a0 = Hom(K1.h_sq(0), K2.h_sq(0), _block_diagonal(K1, K2, iota, 0))
    b0 = Hom(K2.h_sq(0), K3.h_sq(0), _block_diagonal(K2, K3, pi, 0))
    delta = _connecting_hom(K1, K2, K3, iota, pi)
    a1 = Hom(K1.h_sq(1), K2.h_sq(1), _block_diagonal(K1, K2, iota, 1))
    b1 = Hom(K2.h_sq(1), K3.h_sq(1), _block_diagonal(K2, K3, pi, 1))
    maps = [a0, b0, delta, a1, b1]
    terms = [K1.h_group(0), K2.h_group(0), K3.h_group(0),
             K1.h_group(1), K2.h_group(1), K3.h_group(1)]
    joints = [exact_at(a0, b0), exact_at(b0, delta),
              exact_at(delta, a1), exact_at(a1, b1)]
    return SixTermReport(terms, maps, a0.is_injective(), joints,
                         b1.is_surjective(), (K1, K2, K3),
                         ((new1, old1), (new2, old2), (new3, old3)))


# ---------------------------------------------------------------------------
# comparison with the normalization

def nor_comparison(X: MonoidScheme) -> SixTermReport:
    """For a seminormal cancellative scheme, the six-term sequence
    relating the units and Picard group of X to those of its
    normalization, through the quotient sheaf of normalization units
    modulo units.  The H1(F1) -> H1(F2) map is the pullback along the
    normalization."""
    if not X.is_cancellative:
        raise ValueError("comparison needs a cancellative scheme")
    if not all(is_seminormal(s.cancellative) for s in X.stalks.values()):
        raise ValueError("comparison needs a seminormal scheme")
    units = {x: X.stalks[x].unit_group for x in X.points}
    nor_units = {x: normalize(X.stalks[x].cancellative).unit_group
                 for x in X.points}
    F1 = _unit_groups_sheaf(X, units)
    F2 = _unit_groups_sheaf(X, nor_units)
    iota = {}
    for x in X.points:
        cols = []
        for u in units[x].gens:
            c = nor_units[x].express(u)
            if c is None:
                raise ValueError("unit escapes the normalization units")
            cols.append(c)
        iota[x] = _mat_from_cols(cols, rows=F2.ngens[x])
    ngens3 = dict(F2.ngens)
    rels3 = {x: F2.rels[x] + [tuple(iota[x].col(j))
                              for j in range(iota[x].cols)]
             for x in X.points}
    F3 = PosetSheaf(X, ngens3, rels3, F2.maps)
    pi = {x: IntMatrix.identity(F2.ngens[x]) for x in X.points}
    return les_of_sheaf_ses(F1, F2, F3, iota, pi)


# ---------------------------------------------------------------------------
# Cartier divisors

@dataclass
class CartierReport:
    """Global sections of (generic units)/(stalk units), the principal
    ones among them, and the connecting map onto the Picard group."""

    scheme: MonoidScheme
    generic_point: object
    cartier: Subquotient
    cartier_group: PresentedAbGroup
    principal_hom: Hom          # H0(constant) -> H0(quotient)
    modulo_principal: PresentedAbGroup
    delta: Hom                  # H0(quotient) -> H1(units)
    picard: PresentedAbGroup
    h1_constant: PresentedAbGroup
    matches_picard: bool
    complex3: object            # cochain complex of the quotient sheaf
    to_new3: dict               # generic-unit coords -> quotient stalk coords
    to_old3: dict               # and back


def cartier_report(X: MonoidScheme) -> CartierReport:
    """Cartier divisors of an irreducible cancellative scheme, with the
    check that they compute the Picard group modulo principal ones."""
    if not (X.is_cancellative and X.is_irreducible):
        raise ValueError("Cartier divisors need an irreducible "
                         "cancellative scheme")
    eta = X.generic_points[0]
    units0 = X.stalks[eta].unit_group
    n0 = len(units0.gens)
    rels0 = _unit_relations(units0)
    F1 = units_sheaf(X)
    iota = {}
    for x in X.points:
        gh = X.hom(x, eta).ghom
        cols = []
        for u in X.stalks[x].unit_group.gens:
            c = units0.express(gh.apply(u))
            if c is None:
                raise ValueError("stalk unit escapes the generic units")
            cols.append(c)
        iota[x] = _mat_from_cols(cols, rows=n0)
    ident = {(x, y): IntMatrix.identity(n0)
             for x in X.points for y in X.gen[x]}
    F2 = PosetSheaf(X, {x: n0 for x in X.points},
                    {x: rels0 for x in X.points}, ident)
    rels3 = {x: rels0 + [tuple(iota[x].col(j)) for j in range(iota[x].cols)]
             for x in X.points}
    F3 = PosetSheaf(X, {x: n0 for x in X.points}, rels3, ident)
    pi = {x: IntMatrix.identity(n0) for x in X.points}
    rep = les_of_sheaf_ses(F1, F2, F3, iota, pi)
    _, K2, K3 = rep.complexes
    cart = K3.h_sq(0)
    b0, delta = rep.maps[1], rep.maps[2]
    modulo = b0.cokernel_group()
    pic = rep.terms[3]
    matches = (rep.exact_joints[1] and delta.is_surjective()
               and modulo == pic)
    new3, old3 = rep.reductions[2]
    return CartierReport(X, eta, cart, rep.terms[2], b0, modulo, delta,
                         pic, rep.terms[4], matches, K3, new3, old3)


# ---------------------------------------------------------------------------
# Weil divisors and the class group

@dataclass
class WeilDivisor:
    """An integer combination of height-one points."""

    scheme: MonoidScheme
    coeffs: dict

    def vector(self) -> tuple:
        return tuple(self.coeffs.get(z, 0)
                     for z in self.scheme.height_one_points())


def _gp_preimage(X: MonoidScheme, x, f: GroupElement) -> GroupElement:
    """The element of the group of the stalk at x mapping to f under
    the localization toward the generic point."""
    eta = X.generic_points[0]
    gens = X.stalks[x].cancellative.gens
    gh = X.hom(x, eta).ghom
    amb = X.stalks[eta].ambient
    cols = [amb.lift(gh.apply(g)) for g in gens]
    cols += list(amb.torsion_relation_cols())
    sol = solve(_mat_from_cols(cols, rows=amb.pres_dim), amb.lift(f))
    if sol is None:
        raise ValueError("element is not in the group of the stalk")
    out = X.stalks[x].ambient.zero()
    for c, g in zip(sol[:len(gens)], gens):
        out = out + g.scaled(c)
    return out


def point_valuation(X: MonoidScheme, z, f: GroupElement) -> int:
    """The valuation at a height-one point of an element of the group
    of the generic stalk."""
    st = dv_structure(X.stalks[z].cancellative)
    return st.valuation.value(_gp_preimage(X, z, f))


def _require_normal_connected(X: MonoidScheme):
    if not X.is_normal:
        raise ValueError("class group needs a normal scheme")
    if not X.is_connected:
        raise ValueError("class group needs a connected scheme")
    if not X.is_irreducible:
        raise ValueError("class group needs an irreducible scheme")


def class_group_presentation(X: MonoidScheme):
    """Height-one points, the generic-unit generators, and the class
    group as a subquotient of the divisor lattice."""
    _require_normal_connected(X)
    h1 = X.height_one_points()
    gens0 = X.stalks[X.generic_points[0]].cancellative.gens
    structures = {z: dv_structure(X.stalks[z].cancellative) for z in h1}
    cols = []
    for g in gens0:
        cols.append(tuple(structures[z].valuation.value(_gp_preimage(X, z, g))
                          for z in h1))
    return h1, gens0, Subquotient(len(h1), None, cols)


def class_group(X: MonoidScheme) -> PresentedAbGroup:
    """Weil divisors modulo divisors of generic units."""
    return class_group_presentation(X)[2].group()


def principal_divisor(X: MonoidScheme, f: GroupElement) -> WeilDivisor:
    """The divisor of an element of the group of the generic stalk."""
    _require_normal_connected(X)
    h1 = X.height_one_points()
    return WeilDivisor(X, {z: point_valuation(X, z, f) for z in h1})


@dataclass
class ExcisionReport:
    """The sequence (points over Z) -> Cl(X) -> Cl(U) -> 0 for the open
    complement U of the closure of a point."""

    scheme: MonoidScheme
    removed: object
    open_part: MonoidScheme
    cl_total: PresentedAbGroup
    cl_open: PresentedAbGroup
    boundary: Hom
    restriction: Hom
    exact: bool
    surjective: bool


def excision(X: MonoidScheme, z) -> ExcisionReport:
    """Restriction of divisor classes to the complement of the closure
    of z, with the boundary from the height-one points lost."""
    h1x, _, sqx = class_group_presentation(X)
    closed = X.closure(z)
    pts = [p for p in X.points if p not in closed]
    if not pts:
        raise ValueError("the open complement is empty")
    U = X.open_subscheme(pts)
    h1u, _, squ = class_group_presentation(U)
    index = {w: i for i, w in enumerate(h1x)}
    sel = _mat_from_rows(
        [tuple(1 if index[w] == j else 0 for j in range(len(h1x)))
         for w in h1u], len(h1x))
    restriction = Hom(sqx, squ, sel)
    lost = [w for w in h1x if w in closed]
    boundary = Hom(Subquotient(len(lost), None, []), sqx,
                   _mat_from_cols(
                       [tuple(1 if i == index[w] else 0
                              for i in range(len(h1x))) for w in lost],
                       rows=len(h1x)))
    return ExcisionReport(X, z, U, sqx.group(), squ.group(), boundary,
                          restriction, exact_at(boundary, restriction),
                          restriction.is_surjective())


# ---------------------------------------------------------------------------
# Cartier versus Weil

def is_locally_factorial(X: MonoidScheme) -> bool:
    """Every stalk cancellative and normal with trivial class group."""
    for s in X.stalks.values():
        if not s.is_cancellative:
            return False
        if not is_normal(s.cancellative):
            return False
        if not class_group_of_affine(s.cancellative).is_trivial:
            return False
    return True


def cartier_to_weil(X: MonoidScheme, rep: CartierReport,
                    section: tuple) -> WeilDivisor:
    """The Weil divisor of a Cartier section (an ambient vector of the
    degree-zero cochain space of the quotient sheaf): at each
    height-one point, the valuation of the local value."""
    _require_normal_connected(X)
    eta = rep.generic_point
    units0 = X.stalks[eta].unit_group
    K3 = rep.complex3
    coeffs = {}
    for z in X.height_one_points():
        o = K3.offset[0][(z,)]
        seg = section[o:o + K3.sheaf.ngens[z]]
        local = rep.to_old3[z].matvec(seg)
        f = X.stalks[eta].ambient.zero()
        for c, u in zip(local, units0.gens):
            f = f + u.scaled(c)
        coeffs[z] = point_valuation(X, z, f)
    return WeilDivisor(X, coeffs)


def weil_to_cartier(X: MonoidScheme, rep: CartierReport,
                    divisor: WeilDivisor) -> tuple:
    """A Cartier section with the given divisor, on a locally factorial
    scheme: at each point, the sum of local prime generators weighted
    by the divisor coefficients."""
    if not is_locally_factorial(X):
        raise ValueError("Weil divisors need a locally factorial scheme "
                         "to be Cartier")
    eta = rep.generic_point
    units0 = X.stalks[eta].unit_group
    h1 = X.height_one_points()
    K3 = rep.complex3
    section = [0] * K3.dim[0]
    for x in X.points:
        local_h1 = [z for z in h1 if z in X.U(x)]
        gh = X.hom(x, eta).ghom
        f = X.stalks[eta].ambient.zero()
        for z in local_h1:
            n = divisor.coeffs.get(z, 0)
            if n == 0:
                continue
            gen_z = None
            for a in X.stalks[x].cancellative.atoms:
                img = gh.apply(a)
                if point_valuation(X, z, img) == 1 and all(
                        point_valuation(X, w, img) == 0
                        for w in local_h1 if w != z):
                    gen_z = img
                    break
            if gen_z is None:
                raise ValueError(f"no local generator at {x!r} for {z!r}")
            f = f + gen_z.scaled(n)
        c = units0.express(f)
        if c is None:
            raise ValueError("local representative is not a generic unit")
        seg = rep.to_new3[x].matvec(c)
        o = K3.offset[0][(x,)]
        section[o:o + len(seg)] = seg
    out = tuple(section)
    if rep.cartier.coords(out) is None:
        raise ValueError("local representatives do not patch to a section")
    return out


@dataclass
class PicClComparison:
    cartier_modulo_principal: PresentedAbGroup
    cl: PresentedAbGroup
    hom: Hom
    injective: bool
    isomorphism: bool


def pic_cl_comparison(X: MonoidScheme) -> PicClComparison:
    """Cartier divisors modulo principal ones mapped into the class
    group by taking divisors; injective on a normal scheme and an
    isomorphism on a locally factorial one."""
    rep = cartier_report(X)
    h1, _, clsq = class_group_presentation(X)
    cart = rep.cartier
    den = [cart.from_coords(r) for r in cart.rel_coords]
    b0 = rep.principal_hom
    den += [b0.dst.from_coords(col) for col in b0.matrix]
    quot = Subquotient(cart.dim, list(cart.basis), den)
    images = []
    for b in quot.basis:
        d = cartier_to_weil(X, rep, b)
        images.append(d.vector())
    hom = Hom.from_images(quot, clsq, images)
    return PicClComparison(quot.group(), clsq.group(), hom,
                           hom.is_injective(), hom.is_isomorphism())


# ---------------------------------------------------------------------------
# Mayer-Vietoris for a reducible scheme

@dataclass
class MayerVietorisReport:
    """The six-term sequence for the cover of a reducible scheme by the
    closure of its first generic point and the union of the others,
    with piece-by-piece cross checks of each term."""

    report: SixTermReport
    first: MonoidScheme
    rest: MonoidScheme
    overlap: MonoidScheme
    piece_terms_match: bool


def mayer_vietoris(X: MonoidScheme) -> MayerVietorisReport:
    dec = components_decomposition(X)
    etas = X.generic_points
    eta1, others = etas[0], etas[1:]
    sees1 = {x: eta1 in X.U(x) for x in X.points}
    sees2 = {x: any(e in X.U(x) for e in others) for x in X.points}
    units = {x: X.stalks[x].unit_group for x in X.points}
    base = _unit_groups_sheaf(X, units)
    n = dict(base.ngens)

    def piece_sheaf(flag):
        ngens = {x: (n[x] if flag[x] else 0) for x in X.points}
        rels = {x: (base.rels[x] if flag[x] else []) for x in X.points}
        maps = {}
        for x in X.points:
            for y in X.gen[x]:
                if flag[y]:
                    maps[(x, y)] = base.maps[(x, y)]
                else:
                    maps[(x, y)] = IntMatrix(0, ngens[x], ())
        return PosetSheaf(X, ngens, rels, maps)

    F_first = piece_sheaf(sees1)
    F_rest = piece_sheaf(sees2)
    both = {x: sees1[x] and sees2[x] for x in X.points}
    F_over = piece_sheaf(both)
    ngens2 = {x: F_first.ngens[x] + F_rest.ngens[x] for x in X.points}
    rels2 = {}
    maps2 = {}
    for x in X.points:
        rels2[x] = [r + (0,) * F_rest.ngens[x] for r in F_first.rels[x]] + \
                   [(0,) * F_first.ngens[x] + r for r in F_rest.rels[x]]
        for y in X.gen[x]:
            a, b = F_first.maps[(x, y)], F_rest.maps[(x, y)]
            rows = [tuple(a.entries[i]) + (0,) * b.cols
                    for i in range(a.rows)]
            rows += [(0,) * a.cols + tuple(b.entries[i])
                     for i in range(b.rows)]
            maps2[(x, y)] = _mat_from_rows(rows, ngens2[x])
    F2 = PosetSheaf(X, ngens2, rels2, maps2)
    iota = {}
    pi = {}
    for x in X.points:
        top = (IntMatrix.identity(n[x]) if sees1[x]
               else IntMatrix(0, n[x], ()))
        bot = (IntMatrix.identity(n[x]) if sees2[x]
               else IntMatrix(0, n[x], ()))
        iota[x] = _mat_from_rows(
            [tuple(r) for r in top.entries] + [tuple(r) for r in bot.entries],
            n[x])
        if both[x]:
            rows = [tuple(1 if j == i else 0 for j in range(n[x])) +
                    tuple(-1 if j == i else 0 for j in range(n[x]))
                    for i in range(n[x])]
            pi[x] = _mat_from_rows(rows, ngens2[x])
        else:
            pi[x] = IntMatrix(0, ngens2[x], ())
    rep = les_of_sheaf_ses(base, F2, F_over, iota, pi)
    expect = [
        global_units_group(dec.first).direct_sum(
            global_units_group(dec.rest)),
        global_units_group(dec.overlap),
        picard_group(dec.first).direct_sum(picard_group(dec.rest)),
        picard_group(dec.overlap),
    ]
    match = (rep.terms[1] == expect[0] and rep.terms[2] == expect[1]
             and rep.terms[4] == expect[2] and rep.terms[5] == expect[3])
    return MayerVietorisReport(rep, dec.first, dec.rest, dec.overlap, match)


# ---------------------------------------------------------------------------
# pullbacks along scheme maps

def pullback_pic_hom(f: SchemeMap) -> Hom:
    """Pic(dst) -> Pic(src) induced by a scheme map, on the level of the
    unit cochain presentations."""
    Xs, Y = f.src, f.dst
    FX, FY = units_sheaf(Xs), units_sheaf(Y)
    KX, KY = CochainComplex(FX), CochainComplex(FY)
    per_point = {}
    for x in Xs.points:
        fx = f.point_map[x]
        gh = f.stalk_maps[x].ghom
        ux = Xs.stalks[x].unit_group
        cols = []
        for u in Y.stalks[fx].unit_group.gens:
            c = ux.express(gh.apply(u))
            if c is None:
                raise ValueError("scheme map does not pull units back to "
                                 "units")
            cols.append(c)
        per_point[x] = _mat_from_cols(cols, rows=FX.ngens[x])
    rows = [[0] * KY.dim[1] for _ in range(KX.dim[1])]
    for c in KX.chains[1]:
        imgs = tuple(f.point_map[x] for x in c)
        if len(set(imgs)) < len(imgs):
            continue
        m = per_point[c[-1]]
        r0 = KX.offset[1][c]
        c0 = KY.offset[1][imgs]
        for i in range(m.rows):
            for j in range(m.cols):
                rows[r0 + i][c0 + j] = m.entries[i][j]
    carrier = _mat_from_rows([tuple(r) for r in rows], KY.dim[1])
    return Hom(KY.h_sq(1), KX.h_sq(1), carrier)
