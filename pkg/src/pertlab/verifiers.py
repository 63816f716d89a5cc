"""Executable forms of the perturbation-stability results.

Each verifier consumes a base sequence, a perturbation list and an ideal J,
and returns a :class:`VerdictRecord` with outcome verified / violated /
inconclusive.  A violation always carries a concrete witness; any
uncertified ingredient downgrades the outcome to inconclusive rather than
letting a truncation artifact masquerade as a counterexample.

A :class:`Workspace` shares the expensive per-configuration structures
(ideal powers, the unperturbed tables, Artin-Rees numbers, Koszul lengths,
and the rebuilt higher-truncation ring) across many perturbation samples.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from functools import cached_property

from .certify import (EXACT, PLATEAU_MIN_WIDTH, TWO_LEVEL, UNCERTIFIED,
                      CertifiedValue, longest_plateau)
from .errors import FilterRegularityError, PertlabError
from .ideals import (IdealHandle, IdealPowers, colon_subspace, ideal_sum,
                     m_primary_level, zero_ideal)
from .invariants import (HilbertTable, SequenceReport, annihilator_profile,
                         ar_number, filter_regular_check,
                         filter_regular_sequence_check, gr_hilbert_function,
                         koszul_homology_length, order_profile)
from .rings import Element, RingDescriptor

VERIFIED = "verified"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerdictRecord:
    """Outcome of one verifier run, with CSV-ready detail rows."""

    claim: str
    outcome: str
    witness: int | None
    digest: str
    certification: str
    note: str = ""
    rows: tuple[dict, ...] = ()

    def with_context(self, n_pert: int | None, sample: int | None,
                     seed: int | None) -> "VerdictRecord":
        updated = tuple({**row,
                         "N": "" if n_pert is None else n_pert,
                         "sample": "" if sample is None else sample,
                         "seed": "" if seed is None else seed}
                        for row in self.rows)
        return replace(self, rows=updated)


@dataclass(frozen=True)
class BoundReport:
    """Explicit one-element threshold: N = max(t(k+1), h)."""

    t: CertifiedValue
    k: CertifiedValue
    h: CertifiedValue
    n_bound: CertifiedValue
    j_replaced: IdealHandle

    def rows(self) -> tuple[dict, ...]:
        out = []
        for name, cv in (("t", self.t), ("k", self.k), ("h", self.h),
                         ("N", self.n_bound)):
            out.append(_row("bound-n", n=name, value_orig=cv.value,
                            status="ok", certification=cv.status))
        return tuple(out)


def _row(claim: str, n="", value_orig="", value_pert="", status="",
         certification="") -> dict:
    return {"claim": claim, "N": "", "sample": "", "n": n,
            "value_orig": "" if value_orig is None else value_orig,
            "value_pert": "" if value_pert is None else value_pert,
            "status": status, "certification": certification, "seed": ""}


def _digest(*parts: str) -> str:
    blob = "|".join(parts).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def inputs_digest(ring: RingDescriptor, fs: tuple[Element, ...],
                  eps: tuple[Element, ...] | None,
                  j: IdealHandle | None, extra: str = "") -> str:
    return _digest(
        repr(ring),
        ";".join(f.serialize() for f in fs),
        ";".join(e.serialize() for e in eps) if eps else "",
        ";".join(g.serialize() for g in j.gens) if j else "",
        extra)


class Workspace:
    """Cached context for one (ring, sequence, J) configuration."""

    def __init__(self, ring: RingDescriptor, fs: tuple[Element, ...],
                 j: IdealHandle, n_max: int, delta: int = 2):
        self.ring = ring
        self.fs = fs
        self.j = j
        self.n_max = n_max
        self.delta = delta

    @cached_property
    def powers(self) -> IdealPowers:
        return IdealPowers(self.j, self.n_max + 1)

    @cached_property
    def i_handle(self) -> IdealHandle:
        return IdealHandle(self.ring, self.fs)

    @cached_property
    def sequence_report(self) -> SequenceReport:
        return filter_regular_sequence_check(self.fs, delta=self.delta)

    @cached_property
    def gr_orig(self) -> HilbertTable:
        return gr_hilbert_function(self.i_handle, self.j, self.n_max, self.powers)

    @cached_property
    def ar_value(self) -> CertifiedValue:
        return ar_number(self.i_handle, self.j, self.n_max, self.powers,
                         delta=self.delta)

    @cached_property
    def h1(self) -> CertifiedValue:
        return koszul_homology_length(self.fs, 1, delta=self.delta)

    @cached_property
    def ring_hi(self) -> RingDescriptor:
        return self.ring.rebuild(self.ring.D + self.delta)

    def lift_elements(self, elems: tuple[Element, ...]) -> tuple[Element, ...]:
        return tuple(self.ring_hi.element(e.poly) for e in elems)

    def perturbed(self, eps: tuple[Element, ...]) -> tuple[Element, ...]:
        if len(eps) != len(self.fs):
            raise PertlabError("perturbation list length differs from the sequence")
        return tuple(f + e for f, e in zip(self.fs, eps))

    def gr_perturbed(self, eps: tuple[Element, ...]) -> HilbertTable:
        handle = IdealHandle(self.ring, self.perturbed(eps))
        return gr_hilbert_function(handle, self.j, self.n_max, self.powers)


def _tables_certified(*tables: HilbertTable) -> bool:
    return all(t.all_certified() for t in tables)


def _table_rows(claim: str, orig: HilbertTable, pert: HilbertTable) -> tuple[dict, ...]:
    rows = []
    for n, (a, b) in enumerate(zip(orig.entries, pert.entries)):
        status = "match" if a.value == b.value else "mismatch"
        cert = a.status if a.status == b.status else UNCERTIFIED
        rows.append(_row(claim, n=n, value_orig=a.value, value_pert=b.value,
                         status=status, certification=cert))
    return tuple(rows)


def check_main_equality(ws: Workspace, eps: tuple[Element, ...],
                        pert_table: HilbertTable | None = None) -> VerdictRecord:
    """Do the gr tables of the original and perturbed quotients agree in all
    degrees up to n_max?  Runs with non-filter-regular input are permitted and
    labeled negative controls."""
    orig = ws.gr_orig
    pert = pert_table if pert_table is not None else ws.gr_perturbed(eps)
    digest = inputs_digest(ws.ring, ws.fs, eps, ws.j, f"n_max={ws.n_max}")
    note = "" if ws.sequence_report.passed else "negative control: base sequence " \
                                               "is not filter-regular"
    rows = _table_rows("main-equality", orig, pert)
    if not _tables_certified(orig, pert):
        return VerdictRecord("main-equality", INCONCLUSIVE, None, digest,
                             UNCERTIFIED, note="uncertified table entries; " + note,
                             rows=rows)
    cert = EXACT if all(e.status == EXACT for e in orig.entries + pert.entries) \
        else TWO_LEVEL
    for n in range(ws.n_max + 1):
        if orig.entries[n].value != pert.entries[n].value:
            return VerdictRecord("main-equality", VIOLATED, n, digest, cert,
                                 note=note, rows=rows)
    return VerdictRecord("main-equality", VERIFIED, None, digest, cert,
                         note=note, rows=rows)


def check_surjection_monotonicity(ws: Workspace, eps: tuple[Element, ...],
                                  pert_table: HilbertTable | None = None
                                  ) -> VerdictRecord:
    """Perturbing inside J^(k+1), k the Artin-Rees number of the ideal, can
    only shrink the gr table pointwise.  Unconditional: no filter-regularity
    hypothesis."""
    digest = inputs_digest(ws.ring, ws.fs, eps, ws.j, "monotonicity")
    k = ws.ar_value
    if k.value is None:
        return VerdictRecord("monotonicity", INCONCLUSIVE, None, digest,
                             k.status, note=f"Artin-Rees number unresolved: {k.note}")
    depth = k.value + 1
    power = ws.powers.handle(depth)  # extends the cache on demand
    for idx, e in enumerate(eps):
        if not power.contains_element(e):
            return VerdictRecord(
                "monotonicity", INCONCLUSIVE, idx + 1, digest, k.status,
                note=f"precondition unmet: perturbation {idx + 1} is not in "
                     f"J^{depth}")
    orig = ws.gr_orig
    pert = pert_table if pert_table is not None else ws.gr_perturbed(eps)
    rows = _table_rows("monotonicity", orig, pert)
    if not _tables_certified(orig, pert):
        return VerdictRecord("monotonicity", INCONCLUSIVE, None, digest,
                             UNCERTIFIED, note="uncertified table entries",
                             rows=rows)
    for n in range(ws.n_max + 1):
        if pert.entries[n].value > orig.entries[n].value:
            return VerdictRecord("monotonicity", VIOLATED, n, digest,
                                 TWO_LEVEL, note=f"pointwise drop fails at n={n}",
                                 rows=rows)
    return VerdictRecord("monotonicity", VERIFIED, None, digest,
                         EXACT if _tables_certified(orig, pert) else TWO_LEVEL,
                         rows=rows)


def _colon_quotient_stats(ring: RingDescriptor, omit_handle: IdealHandle,
                          divisor: Element) -> tuple[int | None, int,
                                                     int | None, int]:
    """Plateau length of (A : g)/A and plateau annihilation exponent of the
    colon into A."""
    target = omit_handle.subspace
    colon = colon_subspace(target, divisor)
    cuts = [ring.cut(w) for w in range(ring.D + 1)]
    length_profile = order_profile(colon, target, cuts)
    l_val, l_width = longest_plateau(length_profile)
    ann_profile = annihilator_profile(ring, colon.rows, target)
    h_val, h_width = longest_plateau(ann_profile)
    return l_val, l_width, h_val, h_width


def check_control_colon(ws: Workspace, eps: tuple[Element, ...]) -> VerdictRecord:
    """Colon quotients of the perturbed sequence stay bounded by the first
    Koszul homology length h of the base sequence, and are killed by m^h."""
    digest = inputs_digest(ws.ring, ws.fs, eps, None, "control-colon")
    h = ws.h1
    if not h.is_certified():
        return VerdictRecord("control-colon", INCONCLUSIVE, None, digest,
                             h.status, note=f"H_1 length unresolved: {h.note}")
    pert_lo = ws.perturbed(eps)
    pert_hi = ws.lift_elements(pert_lo)
    rows = []
    worst = TWO_LEVEL
    outcome = VERIFIED
    witness = None
    for i in range(len(pert_lo)):
        stats = []
        for ring, pert in ((ws.ring, pert_lo), (ws.ring_hi, pert_hi)):
            omit = IdealHandle(ring, pert[:i] + pert[i + 1:])
            stats.append(_colon_quotient_stats(ring, omit, pert[i]))
        (l_lo, lw_lo, h_lo, hw_lo), (l_hi, lw_hi, h_hi, hw_hi) = stats
        resolved = (l_lo == l_hi and h_lo == h_hi and l_lo is not None
                    and h_lo is not None
                    and min(lw_lo, lw_hi, hw_lo, hw_hi) >= PLATEAU_MIN_WIDTH)
        ok = resolved and l_lo <= h.value and h_lo <= h.value
        rows.append(_row("control-colon", n=i + 1, value_orig=l_lo,
                         value_pert=h_lo,
                         status="ok" if ok else ("unresolved" if not resolved
                                                 else "exceeds"),
                         certification=TWO_LEVEL if resolved else UNCERTIFIED))
        if not resolved:
            outcome = INCONCLUSIVE
            worst = UNCERTIFIED
        elif not ok and outcome != INCONCLUSIVE:
            outcome = VIOLATED
            witness = i + 1
    note = f"bound h = {h.value} from the first Koszul homology"
    return VerdictRecord("control-colon", outcome, witness, digest, worst,
                         note=note, rows=tuple(rows))


def check_perturbed_filter_regular(ws: Workspace,
                                   eps: tuple[Element, ...]) -> VerdictRecord:
    """Does the perturbed sequence stay filter-regular?  The record keeps the
    order of each perturbation for empirical threshold mapping."""
    digest = inputs_digest(ws.ring, ws.fs, eps, None, "preservation")
    pert = ws.perturbed(eps)
    report = filter_regular_sequence_check(pert, delta=ws.delta)
    orders = tuple(e.order() for e in eps)
    rows = []
    for step in report.steps:
        rows.append(_row("preservation", n=step.index,
                         value_orig=step.exponent.value,
                         status="pass" if step.passed else "fail",
                         certification=step.exponent.status))
    note = f"perturbation orders {orders}"
    uncertified = any(s.exponent.status == UNCERTIFIED for s in report.steps)
    if uncertified:
        return VerdictRecord("preservation", INCONCLUSIVE, report.first_failure,
                             digest, UNCERTIFIED, note=note, rows=tuple(rows))
    if report.passed:
        return VerdictRecord("preservation", VERIFIED, None, digest, TWO_LEVEL,
                             note=note, rows=tuple(rows))
    return VerdictRecord("preservation", VIOLATED, report.first_failure, digest,
                         TWO_LEVEL, note=note, rows=tuple(rows))


def report_ar_comparison(ws: Workspace, eps: tuple[Element, ...]) -> VerdictRecord:
    """Artin-Rees numbers of the original and perturbed ideals, reported as
    data: preservation of the Artin-Rees number is an open suspicion, so
    disagreement is recorded, never judged a violation."""
    digest = inputs_digest(ws.ring, ws.fs, eps, ws.j, "ar-comparison")
    orig = ws.ar_value
    pert_handle = IdealHandle(ws.ring, ws.perturbed(eps))
    pert = ar_number(pert_handle, ws.j, ws.n_max, ws.powers, delta=ws.delta)
    rows = (_row("ar-comparison", n=0, value_orig=orig.value,
                 value_pert=pert.value,
                 status="equal" if orig.value == pert.value else "differs",
                 certification=orig.status if orig.status == pert.status
                 else UNCERTIFIED),)
    if orig.is_certified() and pert.is_certified() and orig.value == pert.value:
        return VerdictRecord("ar-comparison", VERIFIED, None, digest, TWO_LEVEL,
                             note="data only: values agree on this window",
                             rows=rows)
    return VerdictRecord("ar-comparison", INCONCLUSIVE, None, digest,
                         UNCERTIFIED if not (orig.is_certified()
                                             and pert.is_certified())
                         else TWO_LEVEL,
                         note="data only: no preservation claim is asserted",
                         rows=rows)


def bound_N_one_element(f: Element, j: IdealHandle, n_max: int | None = None,
                        delta: int = 2) -> BoundReport:
    """Explicit threshold for a single filter-regular element: with
    t the primary level of (f) + J, k its Artin-Rees number and h the
    annihilation exponent of (0 : f), every perturbation of order at least
    N = max(t(k+1), h) preserves the gr table."""
    ring = f.ring
    passed, h = filter_regular_check(zero_ideal(ring), f, delta=delta)
    if not passed:
        raise FilterRegularityError(
            "element is not filter-regular: (0 : f) is not annihilated by any "
            "power of the maximal ideal at a stable plateau")
    f_ideal = IdealHandle(ring, (f,))
    j_replaced = ideal_sum(f_ideal, j)
    t = m_primary_level(j_replaced)
    if t.value is None:
        raise PertlabError("(f) + J carries no m-primary certificate at this "
                           "truncation; raise D")
    window = n_max if n_max is not None else 2 * t.value + 4
    k = ar_number(f_ideal, j_replaced, window, delta=delta)
    if k.value is None:
        raise PertlabError(f"Artin-Rees number not found within window {window}")
    n_val = max(t.value * (k.value + 1), h.value)
    statuses = {t.status, k.status, h.status}
    status = EXACT if statuses == {EXACT} else (
        TWO_LEVEL if UNCERTIFIED not in statuses else UNCERTIFIED)
    n_cert = CertifiedValue(n_val, status, (ring.D, ring.D + delta),
                            note="max(t(k+1), h)")
    return BoundReport(t, k, h, n_cert, j_replaced)
