"""Sheaves of units, Picard groups, Cartier and Weil divisors, class
groups, and the comparison sequences between them."""

import math
import random

import pytest
from corpus import (
    Z1,
    Z2,
    affine,
    affine_line,
    affine_plane,
    axes_scheme,
    example1_scheme,
    example2_scheme,
    glued_lines,
    hirzebruch_fan,
    p1_cross_p1,
    projective,
    quadric_monoid,
    quadric_scheme,
    two_p1_wedge,
    weighted_p112_fan,
)
from monoscheme.divisors import (
    CochainComplex,
    WeilDivisor,
    cartier_report,
    cartier_to_weil,
    class_group,
    class_group_presentation,
    excision,
    global_units_group,
    is_locally_factorial,
    mayer_vietoris,
    nor_comparison,
    pic_cl_comparison,
    picard_group,
    point_valuation,
    principal_divisor,
    pullback_pic_hom,
    units_sheaf,
    weil_to_cartier,
)
from monoscheme.lattice import PresentedAbGroup, compose
from monoscheme.oracle import verify
from monoscheme.scheme import (
    Fan,
    disjoint_union,
    from_fan,
    glue_along_generic,
    mspec_scheme,
    product,
    projection_map,
    scheme_seminormalization,
)

Z = PresentedAbGroup.free
C = PresentedAbGroup.cyclic
T = PresentedAbGroup.trivial


def cusp_line():
    """Two cuspidal charts glued along the generic point."""
    c1 = mspec_scheme(affine(Z1, [(2,), (3,)]))
    c2 = mspec_scheme(affine(Z1, [(-2,), (-3,)]))
    return glue_along_generic([c1, c2])


# ---------------------------------------------------------------------------
# the units sheaf and its cochain complex

def test_units_sheaf_stalk_groups():
    F = units_sheaf(quadric_scheme())
    assert F.stalk_group(()) == T()
    assert F.stalk_group((0,)) == Z(1)
    assert F.stalk_group((1,)) == Z(1)
    assert F.stalk_group((0, 1)) == Z(2)


def test_cochain_d_squared_is_zero():
    for X in (projective(2), example1_scheme(), two_p1_wedge()):
        K = CochainComplex(units_sheaf(X))
        dd = compose(K.d(0), K.d(1))
        sq = K.cochain_sq(2)
        assert all(sq.is_zero(col) for col in dd.matrix)


def test_h0_of_units_sheaf_is_global_units():
    for X in (affine_line(), projective(1), example2_scheme(2)):
        K = CochainComplex(units_sheaf(X))
        assert K.h_group(0) == global_units_group(X)


# ---------------------------------------------------------------------------
# global units and Picard groups of the named fixtures

def test_global_units_trivial_on_sharp_fixtures():
    for X in (affine_line(), affine_plane(), projective(1), projective(2),
              quadric_scheme(), example2_scheme(3)):
        assert global_units_group(X) == T()


def test_global_units_of_monoid_with_unit_part():
    amb = Z2
    m = affine(amb, [(1, 0), (0, 1), (0, -1)])
    assert global_units_group(mspec_scheme(m)) == Z(1)


def test_picard_of_affine_schemes_is_trivial():
    for X in (affine_line(), affine_plane(), quadric_scheme(),
              axes_scheme()):
        assert picard_group(X) == T()


def test_picard_of_projective_spaces():
    assert picard_group(projective(1)) == Z(1)
    assert picard_group(projective(2)) == Z(1)


def test_picard_of_hirzebruch_surface():
    X = from_fan(hirzebruch_fan())
    assert picard_group(X) == Z(2)
    assert class_group(X) == Z(2)
    assert is_locally_factorial(X)


def test_picard_of_weighted_plane():
    X = from_fan(weighted_p112_fan())
    assert picard_group(X) == Z(1)
    assert class_group(X) == Z(1)
    assert not is_locally_factorial(X)
    cmp = pic_cl_comparison(X)
    # the generator of Pic maps to twice a generator of Cl
    assert cmp.injective and not cmp.isomorphism


def test_picard_of_glued_lines_matches_class_group():
    for k in (2, 3, 4):
        X = glued_lines(k)
        assert picard_group(X) == Z(k - 1)
        assert class_group(X) == Z(k - 1)


def test_picard_of_wedge_of_projective_lines():
    assert picard_group(two_p1_wedge()) == Z(2)


def test_picard_of_twisted_glue():
    assert picard_group(example1_scheme()) == Z(1)


def test_picard_of_group_algebra_line():
    for t in (2, 3):
        assert picard_group(example2_scheme(t)) == Z(1).direct_sum(C(t))


# ---------------------------------------------------------------------------
# the six-term comparison with the normalization

def test_nor_comparison_twisted_glue():
    rep = nor_comparison(example1_scheme())
    assert [str(g) for g in rep.terms] == ["0", "0", "0", "Z", "Z", "Z/2"]
    assert rep.exact and rep.injective_start and rep.surjective_end
    pstar = rep.maps[3]
    assert pstar.is_injective() and not pstar.is_surjective()
    assert pstar.cokernel_group() == C(2)


def test_nor_comparison_group_algebra_line():
    for t in (2, 3):
        rep = nor_comparison(example2_scheme(t))
        u = C(t)
        assert rep.terms[0] == T()
        assert rep.terms[1] == u
        assert rep.terms[2] == u.direct_sum(u)
        assert rep.terms[3] == Z(1).direct_sum(u)
        assert rep.terms[4] == Z(1)
        assert rep.terms[5] == T()
        assert rep.exact
        pstar = rep.maps[3]
        assert pstar.is_surjective() and not pstar.is_injective()
        assert pstar.kernel_group() == u


def test_nor_comparison_rejects_bad_inputs():
    with pytest.raises(ValueError):
        nor_comparison(axes_scheme())
    with pytest.raises(ValueError):
        nor_comparison(cusp_line())


def sheaf_claim(sheaf, kind, group):
    X = sheaf.scheme
    return {
        "kind": kind,
        "points": list(X.points),
        "gen": {x: list(X.gen[x]) for x in X.points},
        "ngens": dict(sheaf.ngens),
        "rels": {x: list(sheaf.rels[x]) for x in X.points},
        "maps": {k: m.entries for k, m in sheaf.maps.items()},
        "group": group,
    }


def test_quotient_sheaf_cohomology_against_enumeration():
    # the engine's H0 and H1 of the finite quotient sheaf, re-derived by
    # brute-force enumeration of families and cocycles
    for X in (example1_scheme(), example2_scheme(2), example2_scheme(3)):
        rep = nor_comparison(X)
        H = rep.complexes[2].sheaf
        v0 = verify(sheaf_claim(H, "h0-sections", rep.terms[2]))
        v1 = verify(sheaf_claim(H, "h1-cocycles", rep.terms[5]))
        assert v0.status == "CONFIRMED"
        assert v1.status == "CONFIRMED"
        wrong = verify(sheaf_claim(H, "h1-cocycles", C(5)))
        assert wrong.status == "REFUTED"


# ---------------------------------------------------------------------------
# Cartier divisors

def test_cartier_sections_of_projective_line():
    rep = cartier_report(projective(1))
    assert rep.cartier_group == Z(2)
    assert rep.modulo_principal == Z(1)
    assert rep.h1_constant == T()
    assert rep.matches_picard


def test_cartier_sections_of_projective_plane():
    rep = cartier_report(projective(2))
    assert rep.cartier_group == Z(3)
    assert rep.modulo_principal == Z(1)
    assert rep.matches_picard


def test_cartier_matches_picard_on_fixtures():
    for X in (affine_line(), quadric_scheme(), example1_scheme(),
              from_fan(hirzebruch_fan()), from_fan(weighted_p112_fan())):
        assert cartier_report(X).matches_picard


def test_cartier_rejects_bad_inputs():
    with pytest.raises(ValueError):
        cartier_report(axes_scheme())
    with pytest.raises(ValueError):
        cartier_report(disjoint_union([affine_line(), affine_line()]))


# ---------------------------------------------------------------------------
# valuations, Weil divisors, and class groups

def test_quadric_valuations():
    X = quadric_scheme()
    h1 = X.height_one_points()
    assert h1 == [(0,), (1,)]
    e = Z2.element
    assert [point_valuation(X, z, e((1, 0))) for z in h1] == [0, 2]
    assert [point_valuation(X, z, e((1, 2))) for z in h1] == [2, 0]
    assert [point_valuation(X, z, e((1, 1))) for z in h1] == [1, 1]


def test_quadric_membership_is_nonnegativity_of_valuations():
    X = quadric_scheme()
    h1 = X.height_one_points()
    m = quadric_monoid()
    for a in range(-3, 4):
        for b in range(-6, 7):
            f = Z2.element((a, b))
            nonneg = all(point_valuation(X, z, f) >= 0 for z in h1)
            assert nonneg == m.cancellative.contains(f)
            # hand inequalities for this cone: 0 <= b <= 2a
            assert nonneg == (b >= 0 and 2 * a - b >= 0)


def test_principal_divisor_is_additive():
    X = quadric_scheme()
    gens = X.stalks[X.generic_points[0]].cancellative.gens
    rng = random.Random(13)
    for _ in range(20):
        f = Z2.zero()
        g = Z2.zero()
        for gen in gens:
            f = f + gen.scaled(rng.randrange(-2, 3))
            g = g + gen.scaled(rng.randrange(-2, 3))
        df = principal_divisor(X, f).vector()
        dg = principal_divisor(X, g).vector()
        dfg = principal_divisor(X, f + g).vector()
        assert dfg == tuple(a + b for a, b in zip(df, dg))


def test_principal_divisors_have_trivial_class():
    for X in (quadric_scheme(), projective(2)):
        h1, gens0, sq = class_group_presentation(X)
        for g in gens0:
            v = principal_divisor(X, g).vector()
            c = sq.coords(v)
            assert c is not None and sq.is_zero(c)


def test_class_group_of_quadric():
    X = quadric_scheme()
    assert class_group(X) == C(2)
    # a single ray divisor generates; twice it is principal
    h1, _, sq = class_group_presentation(X)
    one_ray = tuple(1 if i == 0 else 0 for i in range(len(h1)))
    assert not sq.is_zero(sq.coords(one_ray))
    twice = tuple(2 * c for c in one_ray)
    assert sq.is_zero(sq.coords(twice))


def test_class_group_of_projective_spaces():
    assert class_group(projective(1)) == Z(1)
    assert class_group(projective(2)) == Z(1)


def test_class_group_of_affine_spaces():
    assert class_group(affine_line()) == T()
    assert class_group(affine_plane()) == T()


def test_class_group_of_glued_lines():
    for k in (2, 3, 4, 5):
        assert class_group(glued_lines(k)) == Z(k - 1)


def test_class_group_of_products():
    assert class_group(p1_cross_p1()) == Z(2)
    assert class_group(product(quadric_scheme(), affine_line())) == C(2)
    assert class_group(product(projective(1), affine_line())) == Z(1)


def test_class_group_rejects_bad_inputs():
    with pytest.raises(ValueError):
        class_group(axes_scheme())
    with pytest.raises(ValueError):
        class_group(example1_scheme())
    with pytest.raises(ValueError):
        class_group(disjoint_union([affine_line(), affine_line()]))


def test_excision_on_projective_plane():
    X = projective(2)
    rep = excision(X, X.height_one_points()[0])
    assert rep.cl_total == Z(1)
    assert rep.cl_open == T()
    assert rep.exact and rep.surjective


def test_excision_on_quadric():
    X = quadric_scheme()
    rep = excision(X, X.height_one_points()[0])
    assert rep.cl_total == C(2)
    assert rep.cl_open == T()
    assert rep.exact and rep.surjective


def test_excision_keeps_class_group_away_from_deep_points():
    X = projective(2)
    closed = [x for x in X.points if X.heights[x] == 2][0]
    rep = excision(X, closed)
    assert rep.cl_open == Z(1)
    assert rep.exact and rep.surjective


# ---------------------------------------------------------------------------
# Cartier versus Weil

def test_locally_factorial_fixtures():
    assert is_locally_factorial(affine_plane())
    assert is_locally_factorial(projective(2))
    assert is_locally_factorial(from_fan(hirzebruch_fan()))
    assert not is_locally_factorial(quadric_scheme())
    assert not is_locally_factorial(from_fan(weighted_p112_fan()))


def test_weil_cartier_round_trip_on_projective_plane():
    X = projective(2)
    rep = cartier_report(X)
    h1 = X.height_one_points()
    rng = random.Random(29)
    for _ in range(10):
        coeffs = {z: rng.randrange(-2, 3) for z in h1}
        d = WeilDivisor(X, coeffs)
        section = weil_to_cartier(X, rep, d)
        back = cartier_to_weil(X, rep, section)
        assert back.vector() == d.vector()


def test_weil_to_cartier_needs_locally_factorial():
    X = quadric_scheme()
    rep = cartier_report(X)
    d = WeilDivisor(X, {X.height_one_points()[0]: 1})
    with pytest.raises(ValueError):
        weil_to_cartier(X, rep, d)


def test_pic_embeds_in_cl_and_is_iso_when_locally_factorial():
    for X in (projective(1), projective(2), from_fan(hirzebruch_fan())):
        cmp = pic_cl_comparison(X)
        assert cmp.injective and cmp.isomorphism
        assert cmp.cartier_modulo_principal == cmp.cl
    cmp = pic_cl_comparison(quadric_scheme())
    assert cmp.injective and not cmp.isomorphism
    assert cmp.cartier_modulo_principal == T()
    assert cmp.cl == C(2)


# ---------------------------------------------------------------------------
# Mayer-Vietoris for reducible schemes

def test_mayer_vietoris_on_axes():
    mv = mayer_vietoris(axes_scheme())
    assert mv.report.exact
    assert mv.piece_terms_match
    assert all(g == T() for g in mv.report.terms)


def test_mayer_vietoris_on_wedge():
    mv = mayer_vietoris(two_p1_wedge())
    assert mv.report.exact
    assert mv.piece_terms_match
    assert mv.report.terms[3] == Z(2)
    assert mv.report.terms[4] == Z(2)
    assert mv.report.terms[5] == T()


def test_mayer_vietoris_needs_reducible_scheme():
    with pytest.raises(ValueError):
        mayer_vietoris(projective(1))


# ---------------------------------------------------------------------------
# pullbacks along scheme maps

def test_picard_is_invariant_under_line_factors():
    p1 = projective(1)
    line = affine_line()
    prod = product(p1, line)
    pr = projection_map(prod, p1, line, first=True)
    h = pullback_pic_hom(pr)
    assert h.is_isomorphism()
    assert picard_group(prod) == Z(1)


def test_picard_is_invariant_under_seminormalization():
    X = cusp_line()
    assert picard_group(X) == Z(1)
    sn, to_x = scheme_seminormalization(X)
    h = pullback_pic_hom(to_x)
    assert h.is_isomorphism()
    assert picard_group(sn) == Z(1)


def random_complete_fan(rng):
    rays = {(1, 0), (0, 1), (-1, 0), (0, -1)}
    for _ in range(rng.randrange(0, 4)):
        a, b = rng.randrange(-3, 4), rng.randrange(-3, 4)
        if a == 0 and b == 0:
            continue
        g = math.gcd(a, b)
        rays.add((a // g, b // g))
    ordered = sorted(rays, key=lambda r: math.atan2(r[1], r[0]))
    k = len(ordered)
    cones = [frozenset()] + [frozenset((i,)) for i in range(k)] + \
            [frozenset((i, (i + 1) % k)) for i in range(k)]
    return Fan(2, tuple(ordered), frozenset(cones))


def test_random_complete_fans():
    rng = random.Random(20260814)
    for _ in range(12):
        fan = random_complete_fan(rng)
        X = from_fan(fan)
        pic = picard_group(X)
        assert pic.invariant_factors == ()
        assert class_group(X) == Z(len(fan.rays) - 2)
        cmp = pic_cl_comparison(X)
        assert cmp.injective
        if is_locally_factorial(X):
            assert cmp.isomorphism and pic == class_group(X)
