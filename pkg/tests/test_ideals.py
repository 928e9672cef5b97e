"""Ideal arithmetic, face primes, radicals, and primary decomposition."""

import random

from monoscheme.ideals import (
    MonoidIdeal,
    PrimeIdeal,
    intersect_primes,
    mspec,
    nil_ideal,
    reduced_monoid,
)
from monoscheme.monoid import AffineMonoid, AmbientGroup, PcMonoid
from monoscheme.oracle import EnumerationBudget, verify


def free_pc(rank):
    amb = AmbientGroup(rank, ())
    gens = [amb.element(tuple(1 if j == i else 0 for j in range(rank)))
            for i in range(rank)]
    return PcMonoid(AffineMonoid(amb, gens), [])


def el(parent, *coords):
    return parent.cancellative.ambient.element(tuple(coords))


def box(rank, hi):
    if rank == 0:
        yield ()
        return
    for rest in box(rank - 1, hi):
        for v in range(hi + 1):
            yield rest + (v,)


def test_normal_form():
    n2 = free_pc(2)
    i = MonoidIdeal(n2, [el(n2, 2, 0), el(n2, 3, 0), el(n2, 1, 1)])
    assert sorted(g.free for g in i.cgens) == [(1, 1), (2, 0)]
    j = MonoidIdeal(n2, [el(n2, 2, 0), el(n2, 1, 1), el(n2, 2, 1)])
    assert i.same_ideal(j)
    assert not i.same_ideal(MonoidIdeal(n2, [el(n2, 1, 1)]))


def test_normal_form_mod_units():
    # x >= 0 half plane: y is invertible, so (1, 5) and (1, -3) agree
    amb = AmbientGroup(2, ())
    hp = PcMonoid(AffineMonoid(amb, [amb.element((1, 0)), amb.element((0, 1)),
                                     amb.element((0, -1))]), [])
    i = MonoidIdeal(hp, [el(hp, 1, 5)])
    j = MonoidIdeal(hp, [el(hp, 1, -3)])
    assert len(i.cgens) == 1
    assert i.same_ideal(j)
    assert i.contains(el(hp, 3, -7))


def test_generator_validation():
    n2 = free_pc(2)
    try:
        MonoidIdeal(n2, [el(n2, -1, 0)])
        assert False
    except ValueError:
        pass
    amb = AmbientGroup(1, ())
    line = PcMonoid(AffineMonoid(amb, [amb.element((1,)), amb.element((-1,))]), [])
    u = MonoidIdeal(line, [amb.element((2,))])
    assert u.is_unit_ideal


def test_contains_scan():
    n2 = free_pc(2)
    i = MonoidIdeal(n2, [el(n2, 2, 1), el(n2, 0, 3)])
    for v in box(2, 6):
        expect = (v[0] >= 2 and v[1] >= 1) or v[1] >= 3
        assert i.contains(el(n2, *v)) == expect


def test_sum_product():
    n2 = free_pc(2)
    x = MonoidIdeal(n2, [el(n2, 1, 0)])
    y = MonoidIdeal(n2, [el(n2, 0, 1)])
    assert x.product(y).same_ideal(MonoidIdeal(n2, [el(n2, 1, 1)]))
    m = x.sum(y)
    assert sorted(g.free for g in m.cgens) == [(0, 1), (1, 0)]
    sq = m.product(m)
    assert sorted(g.free for g in sq.cgens) == [(0, 2), (1, 1), (2, 0)]


def test_free_intersection_colon_random():
    rng = random.Random(7)
    n3 = free_pc(3)
    for _ in range(25):
        ig = [el(n3, *(rng.randrange(4) for _ in range(3))) for _ in range(3)]
        jg = [el(n3, *(rng.randrange(4) for _ in range(3))) for _ in range(3)]
        ig = [g for g in ig if not g.is_zero] or [el(n3, 1, 0, 0)]
        jg = [g for g in jg if not g.is_zero] or [el(n3, 0, 1, 0)]
        i, j = MonoidIdeal(n3, ig), MonoidIdeal(n3, jg)
        k = i.intersection(j)
        assert k.certified
        x = el(n3, *(rng.randrange(3) for _ in range(3)))
        c = i.colon(x)
        for v in box(3, 5):
            e = el(n3, *v)
            assert k.contains(e) == (i.contains(e) and j.contains(e))
            assert c.contains(e) == i.contains(e + x)


def test_unit_ideal():
    n2 = free_pc(2)
    i = MonoidIdeal(n2, [el(n2, 2, 1)])
    u = i.colon(el(n2, 3, 1))
    assert u.is_unit_ideal
    assert u.contains(el(n2, 0, 0))
    assert u.same_ideal(i.colon(el(n2, 5, 5)))
    assert not u.same_ideal(i)
    assert u.radical().is_unit_ideal
    assert not u.is_primary()
    assert u.primary_decomposition() == []
    assert u.minimal_primes() == []
    assert i.is_subset_of(u) and not u.is_subset_of(i)
    assert u.product(i).same_ideal(i)


def test_radical_known():
    n2 = free_pc(2)
    assert MonoidIdeal(n2, [el(n2, 2, 0)]).radical().same_ideal(
        MonoidIdeal(n2, [el(n2, 1, 0)]))
    assert MonoidIdeal(n2, [el(n2, 2, 1), el(n2, 0, 2)]).radical().same_ideal(
        MonoidIdeal(n2, [el(n2, 0, 1)]))
    assert MonoidIdeal(n2, [el(n2, 2, 1)]).radical().same_ideal(
        MonoidIdeal(n2, [el(n2, 1, 1)]))
    xy = MonoidIdeal(n2, [el(n2, 1, 1)])
    assert xy.is_radical()
    assert not MonoidIdeal(n2, [el(n2, 2, 0)]).is_radical()
    v = verify({"kind": "radical-membership",
                "ideal": MonoidIdeal(n2, [el(n2, 2, 1)]),
                "element": el(n2, 1, 1)})
    assert v.confirmed and v.witness == 2


def test_minimal_primes():
    n2 = free_pc(2)
    ps = MonoidIdeal(n2, [el(n2, 2, 1)]).minimal_primes()
    assert [p.height() for p in ps] == [1, 1]
    ps = MonoidIdeal(n2, [el(n2, 2, 0), el(n2, 1, 1), el(n2, 0, 2)]).minimal_primes()
    assert len(ps) == 1 and ps[0].height() == 2
    i = MonoidIdeal(n2, [el(n2, 1, 0)])
    assert i.is_prime()
    assert not MonoidIdeal(n2, [el(n2, 2, 0)]).is_prime()
    assert not MonoidIdeal(n2, [el(n2, 1, 1)]).is_prime()
    assert MonoidIdeal(n2, ()).is_prime()


def test_is_primary_pinned():
    n2 = free_pc(2)
    cases = [
        ([(2, 0), (1, 1), (0, 2)], True),
        ([(1, 1)], False),
        ([(2, 1), (0, 2)], False),
        ([(1, 0)], True),
        ([(3, 0)], True),
        ([(2, 1), (0, 2), (3, 0)], True),
    ]
    for gens, expect in cases:
        i = MonoidIdeal(n2, [el(n2, *g) for g in gens])
        assert i.is_primary() == expect, gens
        v = verify({"kind": "primary", "ideal": i,
                    "budget": EnumerationBudget(max_degree=8)})
        assert v.complete or v.status == "REFUTED"
        assert v.confirmed == expect, gens


def test_primary_decomposition_pinned():
    n2 = free_pc(2)
    xy = MonoidIdeal(n2, [el(n2, 1, 1)])
    comps = xy.primary_decomposition()
    assert len(comps) == 2
    got = sorted(sorted(g.free for g in c.cgens) for c in comps)
    assert got == [[(0, 1)], [(1, 0)]]

    i = MonoidIdeal(n2, [el(n2, 2, 0), el(n2, 1, 1)])
    comps = i.primary_decomposition()
    assert len(comps) == 2
    assert comps[0].same_ideal(MonoidIdeal(n2, [el(n2, 1, 0)]))
    assert comps[1].same_ideal(MonoidIdeal(n2, [el(n2, 2, 0), el(n2, 0, 1)]))
    back = comps[0].intersection(comps[1])
    assert back.same_ideal(i)
    assert verify({"kind": "ideal-equality", "left": back, "right": i}).complete

    ass = i.associated_primes()
    assert [p.height() for p in ass] == [1, 2]


def test_decomposition_random_orders_agree():
    rng = random.Random(23)
    n3 = free_pc(3)
    for trial in range(40):
        k = rng.randrange(1, 5)
        gens = []
        while len(gens) < k:
            v = tuple(rng.randrange(4) for _ in range(3))
            if any(v):
                gens.append(el(n3, *v))
        i = MonoidIdeal(n3, gens)
        for order in ("lex", "revlex"):
            comps = i.primary_decomposition(order=order)
            inter = comps[0]
            for c in comps[1:]:
                assert c.is_primary()
                inter = inter.intersection(c)
            assert inter.same_ideal(i)
        pa = [p.face.ray_indices for p in i.associated_primes(order="lex")]
        pb = [p.face.ray_indices for p in i.associated_primes(order="revlex")]
        assert pa == pb
        if trial < 6:
            comp = i.primary_decomposition()[0]
            v = verify({"kind": "primary", "ideal": comp,
                        "budget": EnumerationBudget(max_degree=8)})
            assert v.confirmed and v.complete


def test_intersect_primes_scan():
    n3 = free_pc(3)
    primes = mspec(n3)
    assert len(primes) == 8
    axes = [p for p in primes if p.height() == 2]
    assert len(axes) == 3
    two = intersect_primes(n3, axes[:2])
    for v in box(3, 4):
        e = el(n3, *v)
        assert two.contains(e) == (axes[0].contains(e) and axes[1].contains(e))
    allthree = intersect_primes(n3, axes)
    for v in box(3, 4):
        e = el(n3, *v)
        assert allthree.contains(e) == all(p.contains(e) for p in axes)


def test_mspec_quadric():
    # b <= 2a cone monoid, the xy = z^2 coordinate ring
    amb = AmbientGroup(2, ())
    q = PcMonoid(AffineMonoid(amb, [amb.element((1, 0)), amb.element((1, 1)),
                                    amb.element((1, 2))]), [])
    primes = mspec(q)
    assert [p.height() for p in primes] == [0, 1, 1, 2]
    generic = primes[0]
    assert generic.to_ideal().is_zero_ideal
    maximal = primes[-1]
    for p in primes:
        assert maximal.contains_prime(p)
        assert p.contains_prime(generic)
    ray = next(p for p in primes if p.height() == 1
               and p.contains(el(q, 1, 1)) and not p.contains(el(q, 1, 0)))
    ideal = ray.to_ideal()
    for a in range(6):
        for b in range(2 * a + 1):
            e = el(q, a, b)
            assert ray.contains(e) == (b >= 1)
            assert ideal.contains(e) == (b >= 1)


def test_prime_localize_quotient():
    amb = AmbientGroup(2, ())
    q = PcMonoid(AffineMonoid(amb, [amb.element((1, 0)), amb.element((1, 1)),
                                    amb.element((1, 2))]), [])
    ray = next(p for p in mspec(q) if p.height() == 1
               and not p.contains(el(q, 1, 0)))
    quo = ray.quotient()
    assert quo.contains(el(q, 2, 0))
    assert not quo.contains(el(q, 1, 1))
    loc, hom = ray.localize()
    assert loc.contains(el(q, -1, 0))
    assert loc.contains(el(q, 0, 1))
    assert not loc.contains(el(q, 0, -1))
    assert hom.apply(el(q, 1, 2)) == el(q, 1, 2)


def test_primes_of_collapsed_parent():
    n2 = free_pc(2)
    axes = PcMonoid(n2.cancellative, [el(n2, 1, 1)])
    primes = mspec(axes)
    assert [p.height() for p in primes] == [1, 1, 2]
    cone = axes.cancellative.recession_cone
    top = cone.face_of_vector((1, 1))
    try:
        PrimeIdeal(axes, top)
        assert False
    except ValueError:
        pass
    both = intersect_primes(axes, [p for p in primes if p.height() == 1])
    assert both.is_zero_ideal


def test_nil_and_reduced():
    n2 = free_pc(2)
    fat = PcMonoid(n2.cancellative, [el(n2, 2, 1)])
    nil = nil_ideal(fat)
    assert nil.same_ideal(MonoidIdeal(fat, [el(fat, 1, 1)]))
    red = reduced_monoid(fat)
    assert red.same_pc_monoid(PcMonoid(n2.cancellative, [el(n2, 1, 1)]))
    assert reduced_monoid(red).same_pc_monoid(red)
    assert nil_ideal(n2).is_zero_ideal


def test_nonfree_bounded_operations():
    amb = AmbientGroup(2, ())
    q = PcMonoid(AffineMonoid(amb, [amb.element((1, 0)), amb.element((1, 1)),
                                    amb.element((1, 2))]), [])
    i = MonoidIdeal(q, [el(q, 1, 0)])
    j = MonoidIdeal(q, [el(q, 1, 2)])
    try:
        i.intersection(j)
        assert False
    except ValueError:
        pass
    k = i.intersection(j, degree_bound=8)
    assert not k.certified
    assert k.same_ideal(MonoidIdeal(q, [el(q, 2, 2)]))
    c = k.colon(el(q, 1, 2), degree_bound=8)
    assert c.same_ideal(MonoidIdeal(q, [el(q, 1, 0)]))

    m = MonoidIdeal(q, [el(q, 1, 1)])
    assert m.is_radical()
    assert not m.is_primary(degree_bound=6)
    comps = m.primary_decomposition(degree_bound=6)
    assert len(comps) >= 2
    assert all(not c.certified for c in comps)
    assert all(c.is_primary(degree_bound=6) for c in comps)
    for a in range(5):
        for b in range(2 * a + 1):
            e = el(q, a, b)
            assert all(c.contains(e) for c in comps) == m.contains(e)
