"""Hilbert tables, Artin-Rees numbers, Koszul homology, filter-regularity."""

from __future__ import annotations

import pytest

from pertlab.ideals import (IdealHandle, IdealPowers, ideal, ideal_colon,
                            ideal_length, ideal_product, ideal_sum,
                            maximal_ideal, unit_ideal, zero_ideal)
from pertlab.invariants import (ar_number, filter_regular_check,
                                filter_regular_sequence_check,
                                gr_hilbert_function, hilbert_samuel, hs_table,
                                koszul_homology_length, koszul_report)
from pertlab.rings import build_ring


@pytest.fixture(scope="module")
def plane():
    return build_ring(5, ("x", "y"), [], 11)


@pytest.fixture(scope="module")
def branched():
    return build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 11)


# -- Hilbert functions ---------------------------------------------------------

def test_hs_values_regular_line(plane):
    j = maximal_ideal(plane)
    i = ideal(plane, ["x"])
    for n in range(8):
        assert hilbert_samuel(i, j, n).value == n + 1


def test_hs_values_branched(branched):
    j = maximal_ideal(branched)
    i = ideal(branched, ["x + y", "z"])
    table = hs_table(i, j, 6)
    assert table.values() == (1, 2, 2, 2, 2, 2, 2)
    assert table.all_certified()


def test_hs_unit_ideal(plane):
    table = hs_table(unit_ideal(plane), maximal_ideal(plane), 4)
    assert table.values() == (0, 0, 0, 0, 0)


def test_gr_tables(plane, branched):
    jp = maximal_ideal(plane)
    assert gr_hilbert_function(ideal(plane, ["x"]), jp, 8).values() == (1,) * 9
    jb = maximal_ideal(branched)
    assert gr_hilbert_function(ideal(branched, ["x + y", "z"]), jb, 6).values() \
        == (1, 1, 0, 0, 0, 0, 0)
    assert gr_hilbert_function(ideal(plane, ["x", "y"]), jp, 4).values() \
        == (1, 0, 0, 0, 0)


def test_gr_sums_to_hs(plane):
    j = maximal_ideal(plane)
    i = ideal(plane, ["x^2 + y^3"])
    hs = hs_table(i, j, 7)
    gr = gr_hilbert_function(i, j, 7, IdealPowers(j, 8))
    for n in range(8):
        assert sum(gr.values()[: n + 1]) == hs.values()[n]
        assert gr.values()[n] >= 0
    # monotone: HS is nondecreasing
    assert all(hs.values()[n] <= hs.values()[n + 1] for n in range(7))


# -- Artin-Rees ------------------------------------------------------------------

def test_ar_examples(plane):
    j = maximal_ideal(plane)
    assert ar_number(zero_ideal(plane), j, 6).value == 0
    k = ar_number(ideal(plane, ["x"]), j, 6)
    assert k.value == 1 and k.is_certified()
    assert "s=0 fails" in k.note
    assert ar_number(ideal(plane, ["x", "y"]), j, 6).value == 1


def test_ar_branched(branched):
    j = maximal_ideal(branched)
    k = ar_number(ideal(branched, ["x + y", "z"]), j, 6)
    assert k.is_certified() and k.value is not None


# -- Koszul homology --------------------------------------------------------------

def test_koszul_reference_values():
    plane8 = build_ring(5, ("x", "y"), [], 8)
    fs = (plane8.element("x"), plane8.element("y"))
    h1 = koszul_homology_length(fs, 1)
    assert (h1.value, h1.is_certified()) == (0, True)

    fat = build_ring(5, ("x", "y"), ["x^2"], 8)
    h1_fat = koszul_homology_length((fat.element("x"), fat.element("y")), 1)
    assert (h1_fat.value, h1_fat.is_certified()) == (1, True)

    branched8 = build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 8)
    fs3 = (branched8.element("x + y"), branched8.element("z"))
    h2 = koszul_homology_length(fs3, 2)
    assert (h2.value, h2.is_certified()) == (0, True)


def test_koszul_index_range(plane):
    fs = (plane.element("x"),)
    with pytest.raises(ValueError):
        koszul_homology_length(fs, 2)
    with pytest.raises(ValueError):
        koszul_homology_length(fs, 0)


def test_koszul_regular_sequence_vanishing_and_finiteness():
    plane8 = build_ring(5, ("x", "y"), [], 8)
    report = koszul_report((plane8.element("x"), plane8.element("y")))
    assert tuple(cv.value for cv in report.lengths) == (0, 0)
    assert all(report.finite)


def test_koszul_h0_consistency():
    from pertlab.invariants import _koszul_boundary, _reduced_mult_matrix
    from pertlab import linalg
    plane8 = build_ring(5, ("x", "y"), [], 8)
    fs = (plane8.element("x^2"), plane8.element("y^3"))
    # H_0 computed from the complex equals the certified quotient length
    mats = [_reduced_mult_matrix(plane8, f) for f in fs]
    d1 = _koszul_boundary(plane8, mats, 1)
    h0 = plane8.dim - linalg.rank(d1, plane8.p)
    handle = IdealHandle(plane8, fs)
    assert h0 == ideal_length(handle).value == 6


# -- filter-regularity -------------------------------------------------------------

def test_filter_regular_branched_facts():
    r = build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 8)
    ok_z, h_z = filter_regular_check(zero_ideal(r), r.element("z"))
    assert not ok_z
    ok_xy, h_xy = filter_regular_check(zero_ideal(r), r.element("x + y"))
    assert ok_xy and h_xy.value == 1 and h_xy.is_certified()

    seq = filter_regular_sequence_check((r.element("x + y"), r.element("z")))
    assert seq.passed and seq.first_failure is None

    permuted = filter_regular_sequence_check((r.element("z"), r.element("x + y")))
    assert not permuted.passed and permuted.first_failure == 1


def test_filter_regular_simple_cases():
    plane8 = build_ring(5, ("x", "y"), [], 8)
    ok, h = filter_regular_check(zero_ideal(plane8), plane8.element("x"))
    assert ok and h.value == 1
    assert filter_regular_sequence_check((plane8.element("x"),
                                          plane8.element("y"))).passed

    node = build_ring(5, ("x", "y"), ["x*y"], 8)
    assert not filter_regular_check(zero_ideal(node), node.element("y"))[0]
    ok_d, h_d = filter_regular_check(zero_ideal(node), node.element("x + y"))
    assert ok_d and h_d.value == 1

    fat = build_ring(5, ("x", "y"), ["x^2"], 8)
    assert not filter_regular_check(zero_ideal(fat), fat.element("x"))[0]


def test_filter_regular_sheds_truncation_junk():
    # (0 : x^2) vanishes upstream, so the exponent is 1 even though the
    # truncated colon contains boundary junk killed only by m^2
    plane8 = build_ring(5, ("x", "y"), [], 8)
    ok, h = filter_regular_check(zero_ideal(plane8), plane8.element("x^2"))
    assert ok and h.value == 1


def test_filter_regular_unit_degenerate(plane):
    ok, h = filter_regular_check(zero_ideal(plane), plane.element("1 + x"))
    assert ok and "degenerate" in h.note


def test_leading_element_stays_filter_regular_on_tail():
    # on every catalog-style case where (f1, f2) passes, f1 must pass
    # against the ideal generated by the tail
    cases = [
        (build_ring(5, ("x", "y", "z"), ["x*y", "x*z"], 8), "x + y", "z"),
        (build_ring(5, ("x", "y"), [], 8), "x", "y"),
    ]
    for ring, f1_text, f2_text in cases:
        f1, f2 = ring.element(f1_text), ring.element(f2_text)
        assert filter_regular_sequence_check((f1, f2)).passed
        tail = IdealHandle(ring, (f2,))
        assert filter_regular_check(tail, f1)[0]


# -- colon identities --------------------------------------------------------------

def _colon_identity_case(ring, f_text, n_max):
    j = maximal_ideal(ring)
    f = ring.element(f_text)
    powers = IdealPowers(j, n_max)
    k = ar_number(IdealHandle(ring, (f,)), j, n_max, powers).value
    zero_colon = ideal_colon(zero_ideal(ring), f)
    for n in range(k, n_max + 1):
        jn = powers.handle(n)
        lhs = ideal_colon(jn, f)
        rhs = ideal_sum(ideal_product(powers.handle(n - k),
                                      ideal_colon(powers.handle(k), f)),
                        zero_colon)
        assert lhs.equals(rhs), (f_text, n)
        # length identity: len(R/((f) + J^n)) = len((J^n : f)) - len(J^n)
        quotient = ideal_length(ideal_sum(IdealHandle(ring, (f,)), jn)).value
        codim_colon = ring.M - lhs.subspace.rank
        codim_jn = ring.M - jn.subspace.rank
        assert quotient == codim_jn - codim_colon, (f_text, n)


def test_colon_identities_regular_line(plane):
    _colon_identity_case(plane, "x", 6)


def test_colon_identities_node_diagonal():
    node = build_ring(5, ("x", "y"), ["x*y"], 11)
    _colon_identity_case(node, "x + y", 6)
