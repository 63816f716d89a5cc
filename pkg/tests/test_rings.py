"""Truncated model construction, normal forms, certificates."""

from __future__ import annotations

import numpy as np
import pytest

from pertlab.certify import TWO_LEVEL, UNCERTIFIED
from pertlab.errors import RingConstructionError, TruncationError
from pertlab.ideals import ideal, zero_ideal, ideal_colon
from pertlab.rings import (build_ring, nakayama_contains_power,
                           subspace_of_ideal, two_level_value)


def test_build_ring_dimensions():
    assert build_ring(5, ("x", "y"), [], 3).dim == 6
    assert build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 3).dim == 8


def test_build_ring_rejects_bad_input():
    with pytest.raises(RingConstructionError):
        build_ring(4, ("x",), [], 3)
    with pytest.raises(RingConstructionError):
        build_ring(5, ("x", "y"), ["x + 1"], 3)
    with pytest.raises(RingConstructionError):
        build_ring(5, ("x", "y"), [], 1)
    with pytest.raises(RingConstructionError):
        build_ring(5, ("x", "x"), [], 3)


def test_build_ring_deterministic():
    a = build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 5)
    b = build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 5)
    assert np.array_equal(a.base_subspace.rows, b.base_subspace.rows)
    assert a.monomials == b.monomials


def test_normal_form_idempotent():
    ring = build_ring(3, ("x", "y"), ["x^2 + y^2"], 6)
    rng = np.random.default_rng(2)
    for _ in range(25):
        vec = rng.integers(0, 3, ring.M).astype(np.int64)
        once = ring._normal_form(vec)
        twice = ring._normal_form(once.copy())
        assert np.array_equal(once, twice)


def test_order_and_power_membership():
    ring = build_ring(5, ("x", "y"), ["y - x^2"], 8)
    y = ring.element("y")
    assert y.order() == 2  # y rewrites to x^2
    assert ring.element("x").order() == 1
    assert ring.zero().order() == ring.D
    power2 = ring.power_span(2)
    assert power2.contains_vector(y.vec)
    assert not ring.power_span(3).contains_vector(y.vec)


def test_subspace_invariance_under_generators():
    ring = build_ring(5, ("x", "y"), [], 4)
    s1 = subspace_of_ideal(ring, [ring.element("x"), ring.element("x + y")])
    s2 = subspace_of_ideal(ring, [ring.element("y"), ring.element("x")])
    s3 = subspace_of_ideal(ring, [ring.element("3*x"), ring.element("y"),
                                  ring.element("x")])
    assert s1 == s2 == s3
    ring3 = build_ring(5, ("x", "y"), [], 3)
    assert subspace_of_ideal(ring3, [ring3.element("x")]).rank == 3


def test_empty_generators_give_base_subspace():
    ring = build_ring(5, ("x", "y"), [], 4)
    assert subspace_of_ideal(ring, []).rank == 0
    ring2 = build_ring(5, ("x", "y"), ["x*y"], 4)
    assert subspace_of_ideal(ring2, []) == ring2.base_subspace


def test_nakayama_examples():
    ring = build_ring(3, ("x", "y"), [], 6)
    m_sub = subspace_of_ideal(ring, [ring.element("x"), ring.element("y")])
    assert nakayama_contains_power(ring, m_sub, 1)
    a_sub = subspace_of_ideal(ring, [ring.element("x^2"), ring.element("y^3")])
    assert not nakayama_contains_power(ring, a_sub, 3)
    assert nakayama_contains_power(ring, a_sub, 4)
    x_sub = subspace_of_ideal(ring, [ring.element("x")])
    for t in range(1, ring.D - 1):
        assert not nakayama_contains_power(ring, x_sub, t)
    with pytest.raises(TruncationError):
        nakayama_contains_power(ring, m_sub, ring.D)


def test_nakayama_soundness_at_higher_level():
    # whenever the certificate fires at D, it fires again at D+2 and the
    # degree-t monomials are direct members there
    ring = build_ring(3, ("x", "y"), ["x*y"], 6)
    sub = subspace_of_ideal(ring, [ring.element("x^2 + y^2")])
    hits = [t for t in range(1, ring.D) if nakayama_contains_power(ring, sub, t)]
    ring_hi = ring.rebuild(ring.D + 2)
    sub_hi = subspace_of_ideal(ring_hi, [ring_hi.element("x^2 + y^2")])
    for t in hits:
        assert nakayama_contains_power(ring_hi, sub_hi, t)
        for c in range(ring_hi.cut(t), ring_hi.cut(t + 1)):
            vec = np.zeros(ring_hi.M, dtype=np.int64)
            vec[c] = 1
            assert sub_hi.contains_vector(vec)


def test_truncation_compatibility():
    # a certified subspace computed at level D, restricted to degrees < D',
    # matches the level-D' computation
    ring_hi = build_ring(5, ("x", "y"), ["x*y"], 8)
    ring_lo = build_ring(5, ("x", "y"), ["x*y"], 5)
    sub_hi = subspace_of_ideal(ring_hi, [ring_hi.element("x^2"),
                                         ring_hi.element("y^2")])
    sub_lo = subspace_of_ideal(ring_lo, [ring_lo.element("x^2"),
                                         ring_lo.element("y^2")])
    cut = ring_hi.cut(5)
    restricted = sub_hi.rows[:sub_hi.prefix_rank(cut), :cut]
    assert np.array_equal(restricted, sub_lo.rows)


def test_two_level_value_stable_and_unstable():
    ring = build_ring(5, ("x", "y"), [], 4)

    def quotient_len(r):
        sub = subspace_of_ideal(r, [r.element("x^2"), r.element("x*y"),
                                    r.element("y^2")])
        return r.M - sub.rank

    cert = two_level_value(quotient_len, ring, 2)
    assert cert.value == 3 and cert.status == TWO_LEVEL

    def colon_rank(r):
        return ideal_colon(zero_ideal(r), r.element("x")).subspace.rank

    cert2 = two_level_value(colon_rank, ring, 2)
    assert cert2.status == UNCERTIFIED  # truncation junk moves with D

    degenerate = two_level_value(quotient_len, ring, 0)
    assert degenerate.status == TWO_LEVEL and "weak" in degenerate.note


def test_element_lift_between_levels():
    ring = build_ring(5, ("x", "y"), ["x*y"], 5)
    e = ring.element("x + 2*y^3")
    hi = ring.rebuild(8)
    lifted = hi.element(e.poly)
    assert lifted.serialize() == e.serialize()
    assert lifted.ring.D == 8
