"""Shared fixture schemes and monoids used across the test modules."""

from monoscheme.monoid import AffineMonoid, AmbientGroup, GroupHom, PcMonoid
from monoscheme.scheme import (
    Fan,
    from_fan,
    glue,
    glue_along_generic,
    mspec_scheme,
    product,
    projective_fan,
    wedge,
)

Z1 = AmbientGroup(1, ())
Z2 = AmbientGroup(2, ())
Z3 = AmbientGroup(3, ())


def affine(amb, gens, ideal=()):
    return PcMonoid(AffineMonoid(amb, [amb.element(g) for g in gens]),
                    [amb.element(g) for g in ideal])


def free_pc(d):
    amb = AmbientGroup(d, ())
    gens = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    return affine(amb, gens)


def affine_line():
    return mspec_scheme(free_pc(1))


def affine_plane():
    return mspec_scheme(free_pc(2))


def quadric_monoid():
    """The quadric cone monoid generated by (1,0), (1,2), (1,1)."""
    return affine(Z2, [(1, 0), (1, 2), (1, 1)])


def quadric_scheme():
    return mspec_scheme(quadric_monoid())


def axes_monoid():
    """The coordinate axes: N^2 with the mixed product collapsed."""
    return affine(Z2, [(1, 0), (0, 1)], ideal=[(1, 1)])


def axes_scheme():
    return mspec_scheme(axes_monoid())


def projective(n):
    return from_fan(projective_fan(n))


def glued_lines(k):
    """k copies of the affine line glued along the generic point."""
    return glue_along_generic([affine_line() for _ in range(k)])


def hirzebruch_fan():
    rays = ((1, 0), (0, 1), (-1, 1), (0, -1))
    cones = [frozenset(c) for c in
             [(), (0,), (1,), (2,), (3,), (0, 1), (1, 2), (2, 3), (3, 0)]]
    return Fan(2, rays, frozenset(cones))


def weighted_p112_fan():
    rays = ((1, 0), (0, 1), (-1, -2))
    cones = [frozenset(c) for c in
             [(), (0,), (1,), (2,), (0, 1), (1, 2), (0, 2)]]
    return Fan(2, rays, frozenset(cones))


def example1_charts():
    aplus = affine(Z2, [(1, 0), (0, 2), (1, 1)])
    aminus = affine(Z2, [(1, 0), (0, -2), (1, -1)])
    return mspec_scheme(aplus), mspec_scheme(aminus)


def example1_scheme():
    """Two charts with y^2 inverted on the overlap; the normalization
    is the product of a line and a projective line."""
    up, um = example1_charts()
    ident = GroupHom.identity(Z2)
    return glue([up, um], [(0, (0, 1), 1, (0, 1), ident),
                           (0, (1,), 1, (1,), ident)])


def group_algebra_chart(t, sign):
    """The monoid with elements 1 and u x^(sign n), n > 0, u in Z/t."""
    amb = AmbientGroup(1, (t,))
    gens = [amb.element((sign,), (u,)) for u in range(t)]
    return PcMonoid(AffineMonoid(amb, gens), [])


def example2_scheme(t):
    """A projective line whose finite-unit part only appears at the
    generic point; seminormal but not normal."""
    cx = mspec_scheme(group_algebra_chart(t, 1))
    cinv = mspec_scheme(group_algebra_chart(t, -1))
    return glue_along_generic([cx, cinv])


def two_p1_wedge():
    p1a, p1b = projective(1), projective(1)
    return wedge(p1a, (0,), p1b, (1,))


def p1_cross_p1():
    return product(projective(1), projective(1))
