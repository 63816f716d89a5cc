"""Seeded randomized experiments.

A fully specified :class:`ExperimentConfig` determines every random draw, so
identical configs produce identical reports (timing aside).  Randomness
comes from numpy's PCG64 generator keyed through ``SeedSequence`` with the
(config seed, N, sample index) tuple, which makes samples independent of
evaluation order and safe to compute in parallel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .catalog import get as catalog_get
from .certify import EXACT, TWO_LEVEL, UNCERTIFIED
from .errors import PertlabError
from .ideals import IdealHandle, m_primary_level
from .invariants import filter_regular_sequence_check
from .polynomials import TruncPoly
from .rings import Element, RingDescriptor, build_ring, default_truncation
from .verifiers import (BoundReport, VerdictRecord, Workspace, VERIFIED,
                        VIOLATED, INCONCLUSIVE, bound_N_one_element,
                        check_control_colon, check_main_equality,
                        check_perturbed_filter_regular,
                        check_surjection_monotonicity, inputs_digest,
                        report_ar_comparison, _row)


@dataclass(frozen=True)
class RingSpec:
    p: int
    vars: tuple[str, ...]
    base_gens: tuple[str, ...]
    D: int | None = None          # None means "auto"


@dataclass(frozen=True)
class ExperimentConfig:
    ring: RingSpec
    f_exprs: tuple[str, ...]
    j_exprs: tuple[str, ...]
    n_max: int = 8
    n_range: tuple[int, int] | None = None    # inclusive sweep bounds
    samples: int = 20
    seed: int = 0
    delta: int = 2
    catalog_id: str | None = None

    @classmethod
    def from_catalog(cls, catalog_id: str, **overrides) -> "ExperimentConfig":
        entry = catalog_get(catalog_id)
        base = cls(ring=RingSpec(entry.p, entry.vars, entry.base_gens, None),
                   f_exprs=entry.f_exprs, j_exprs=entry.j_exprs,
                   catalog_id=catalog_id)
        return replace(base, **overrides)

    def canonical(self) -> str:
        rng = self.ring
        return "|".join([
            f"p={rng.p}", f"vars={','.join(rng.vars)}",
            f"gens={','.join(rng.base_gens)}", f"D={rng.D or 'auto'}",
            f"f={';'.join(self.f_exprs)}", f"J={';'.join(self.j_exprs)}",
            f"n_max={self.n_max}", f"range={self.n_range}",
            f"samples={self.samples}", f"seed={self.seed}",
            f"delta={self.delta}", f"catalog={self.catalog_id}"])


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    resolved_D: int
    levels: tuple[int, int]
    records: tuple[VerdictRecord, ...]
    n_star: int | None
    theoretical: BoundReport | None
    bound_consistent: bool | None
    certification_summary: str
    timing_s: float

    def rows(self) -> list[dict]:
        out = []
        for rec in self.records:
            out.extend(dict(r) for r in rec.rows)
        return out

    def has_violation(self) -> bool:
        return any(r.outcome == VIOLATED for r in self.records)

    def outcome_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.records:
            counts[r.outcome] = counts.get(r.outcome, 0) + 1
        return counts


def resolve_ring(spec: RingSpec, j_exprs: tuple[str, ...],
                 n_max: int) -> RingDescriptor:
    """Build the ring, resolving D = auto through the default selection rule
    (probe the primary level of J at a small order first)."""
    if spec.D is not None:
        return build_ring(spec.p, spec.vars, spec.base_gens, spec.D)
    probe = build_ring(spec.p, spec.vars, spec.base_gens, 8)
    j_probe = IdealHandle(probe, tuple(probe.element(g) for g in j_exprs))
    t_j = m_primary_level(j_probe).value
    if t_j is None:
        raise PertlabError("J is not certified m-primary at the probe level; "
                           "give D explicitly")
    d = default_truncation(t_j, n_max)
    if d == probe.D:
        return probe
    return build_ring(spec.p, spec.vars, spec.base_gens, d)


def _rng_for(seed: int, n: int, sample: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(n, sample))))


def sample_in_power(ring: RingDescriptor, n: int, seed: int,
                    count: int, spawn: tuple[int, int] | None = None
                    ) -> tuple[Element, ...]:
    """Uniform random elements supported on monomials of degree in [n, D).

    Deterministic per seed; the optional spawn key threads (N, sample index)
    so sweep draws are independent of evaluation order.
    """
    if n >= ring.D:
        raise PertlabError(f"sampling order {n} needs to stay below D={ring.D}")
    rng = _rng_for(seed, *spawn) if spawn else np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed)))
    lo = ring.cut(n)
    out = []
    for _ in range(count):
        vec = np.zeros(ring.M, dtype=np.int64)
        vec[lo:] = rng.integers(0, ring.p, ring.M - lo)
        terms = {ring.monomials[c]: int(vec[c]) for c in np.nonzero(vec)[0]}
        out.append(ring.element(TruncPoly(ring.p, ring.vars, ring.D, terms)))
    return tuple(out)


def sample_in_ideal_power(ws: Workspace, power: int, seed: int,
                          count: int, spawn: tuple[int, int] | None = None
                          ) -> tuple[Element, ...]:
    """Uniform random combinations of an echelon basis of J^power."""
    sub = ws.powers.subspace(power)
    rng = _rng_for(seed, *spawn) if spawn else np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed)))
    out = []
    for _ in range(count):
        coeffs = rng.integers(0, ws.ring.p, sub.rank)
        vec = (coeffs @ sub.rows) % ws.ring.p
        terms = {ws.ring.monomials[c]: int(vec[c]) for c in np.nonzero(vec)[0]}
        out.append(ws.ring.element(TruncPoly(ws.ring.p, ws.ring.vars,
                                             ws.ring.D, terms)))
    return tuple(out)


def _summary(records: tuple[VerdictRecord, ...]) -> str:
    statuses = {r.certification for r in records}
    if statuses <= {EXACT}:
        return EXACT
    if UNCERTIFIED in statuses:
        return UNCERTIFIED
    return TWO_LEVEL


def _sweep(ws: Workspace, config: ExperimentConfig
           ) -> tuple[list[VerdictRecord], dict[tuple[int, int], str]]:
    """Main equality plus monotonicity for every (N, sample); the two share
    one perturbed table."""
    records: list[VerdictRecord] = []
    main_outcomes: dict[tuple[int, int], str] = {}
    lo, hi = config.n_range
    for n in range(lo, hi + 1):
        for s in range(config.samples):
            eps = sample_in_power(ws.ring, n, config.seed, len(ws.fs),
                                  spawn=(n, s))
            pert = ws.gr_perturbed(eps)
            main = check_main_equality(ws, eps, pert_table=pert)
            mono = check_surjection_monotonicity(ws, eps, pert_table=pert)
            records.append(main.with_context(n, s, config.seed))
            records.append(mono.with_context(n, s, config.seed))
            main_outcomes[(n, s)] = main.outcome
    return records, main_outcomes


def _minimal_stable_n(main_outcomes: dict[tuple[int, int], str],
                      config: ExperimentConfig) -> int | None:
    """Least N in range such that every sample at every N' >= N verified."""
    lo, hi = config.n_range
    n_star = None
    for n in range(hi, lo - 1, -1):
        if all(main_outcomes[(n, s)] == VERIFIED for s in range(config.samples)):
            n_star = n
        else:
            break
    return n_star


def find_min_N(config: ExperimentConfig) -> ExperimentReport:
    """Sweep perturbation depths, locate the empirical stability threshold,
    and run the auxiliary verifiers at that threshold.

    For a single filter-regular element the report also carries the explicit
    theoretical threshold and checks the empirical one does not exceed it.
    """
    started = time.monotonic()
    if config.n_range is None:
        raise PertlabError("find-min-n needs an N range")
    ring = resolve_ring(config.ring, config.j_exprs, config.n_max)
    fs = tuple(ring.element(e) for e in config.f_exprs)
    j = IdealHandle(ring, tuple(ring.element(g) for g in config.j_exprs))
    ws = Workspace(ring, fs, j, config.n_max, config.delta)
    records, main_outcomes = _sweep(ws, config)
    n_star = _minimal_stable_n(main_outcomes, config)

    if n_star is not None:
        for s in range(config.samples):
            eps = sample_in_power(ws.ring, n_star, config.seed, len(fs),
                                  spawn=(n_star, s))
            records.append(check_perturbed_filter_regular(ws, eps)
                           .with_context(n_star, s, config.seed))
            records.append(check_control_colon(ws, eps)
                           .with_context(n_star, s, config.seed))
        eps0 = sample_in_power(ws.ring, n_star, config.seed, len(fs),
                               spawn=(n_star, 0))
        records.append(report_ar_comparison(ws, eps0)
                       .with_context(n_star, 0, config.seed))

    theoretical = None
    consistent = None
    if len(fs) == 1 and ws.sequence_report.passed:
        theoretical = bound_N_one_element(fs[0], j, delta=config.delta)
        if theoretical.n_bound.value is not None:
            consistent = (n_star is not None
                          and n_star <= theoretical.n_bound.value)
    rec_tuple = tuple(records)
    digest_rows = tuple(_minn_rows(config, n_star, theoretical))
    rec_tuple = rec_tuple + (VerdictRecord(
        "min-n", VERIFIED if n_star is not None else INCONCLUSIVE,
        n_star, inputs_digest(ring, fs, None, j, config.canonical()),
        _summary(rec_tuple) if rec_tuple else EXACT,
        note=("empirical threshold found" if n_star is not None
              else "no stable N in range"),
        rows=digest_rows),)
    return ExperimentReport(
        config=config, resolved_D=ring.D, levels=(ring.D, ring.D + config.delta),
        records=rec_tuple, n_star=n_star, theoretical=theoretical,
        bound_consistent=consistent,
        certification_summary=_summary(rec_tuple),
        timing_s=time.monotonic() - started)


def _minn_rows(config: ExperimentConfig, n_star: int | None,
               theoretical: BoundReport | None):
    rows = [_row("min-n", n="N*",
                 value_orig=n_star if n_star is not None else "",
                 status="found" if n_star is not None else "not found in range",
                 certification="")]
    if theoretical is not None:
        rows.append(_row("min-n", n="N-theoretical",
                         value_orig=theoretical.n_bound.value,
                         status="bound", certification=theoretical.n_bound.status))
    for r in rows:
        r["seed"] = config.seed
    return rows


def _catalog_checks(ws: Workspace, config: ExperimentConfig
                    ) -> list[VerdictRecord]:
    """Filter-regularity status rows for the configured sequence and any
    extra sequences attached to the catalog entry."""
    records = []
    sequences: list[tuple[str, tuple[Element, ...]]] = [
        ("base", ws.fs)]
    if config.catalog_id:
        entry = catalog_get(config.catalog_id)
        for label, exprs in entry.extra_sequences:
            sequences.append((label, tuple(ws.ring.element(e) for e in exprs)))
    for label, seq in sequences:
        report = (ws.sequence_report if label == "base"
                  else filter_regular_sequence_check(seq, delta=config.delta))
        rows = []
        for step in report.steps:
            rows.append(_row("filter-regular", n=step.index,
                             value_orig=step.exponent.value,
                             status="true" if step.passed else "false",
                             certification=step.exponent.status))
        for r in rows:
            r["seed"] = config.seed
        digest = inputs_digest(ws.ring, seq, None, None, label)
        note = (f"sequence {label}: "
                + ("filter-regular" if report.passed
                   else f"fails at index {report.first_failure}"))
        records.append(VerdictRecord("filter-regular", VERIFIED, None, digest,
                                     _summary_steps(report), note=note,
                                     rows=tuple(rows)))
    return records


def _summary_steps(report) -> str:
    statuses = {s.exponent.status for s in report.steps} or {TWO_LEVEL}
    return UNCERTIFIED if UNCERTIFIED in statuses else TWO_LEVEL


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Catalog checks, the N sweep with all verifiers, and the threshold
    search, aggregated into one report that is a pure function of the
    config."""
    started = time.monotonic()
    ring = resolve_ring(config.ring, config.j_exprs, config.n_max)
    fs = tuple(ring.element(e) for e in config.f_exprs)
    j = IdealHandle(ring, tuple(ring.element(g) for g in config.j_exprs))
    ws = Workspace(ring, fs, j, config.n_max, config.delta)

    records: list[VerdictRecord] = []
    records.extend(_catalog_checks(ws, config))

    n_star = None
    theoretical = None
    consistent = None
    if config.n_range is not None:
        sweep_records, main_outcomes = _sweep(ws, config)
        records.extend(sweep_records)
        n_star = _minimal_stable_n(main_outcomes, config)
        if n_star is not None:
            for s in range(config.samples):
                eps = sample_in_power(ws.ring, n_star, config.seed, len(fs),
                                      spawn=(n_star, s))
                records.append(check_perturbed_filter_regular(ws, eps)
                               .with_context(n_star, s, config.seed))
                records.append(check_control_colon(ws, eps)
                               .with_context(n_star, s, config.seed))
            eps0 = sample_in_power(ws.ring, n_star, config.seed, len(fs),
                                   spawn=(n_star, 0))
            records.append(report_ar_comparison(ws, eps0)
                           .with_context(n_star, 0, config.seed))
    if len(fs) == 1 and ws.sequence_report.passed:
        theoretical = bound_N_one_element(fs[0], j, delta=config.delta)
        records.append(VerdictRecord(
            "bound-n", VERIFIED, None,
            inputs_digest(ring, fs, None, j, "bound"),
            theoretical.n_bound.status, note="explicit one-element threshold",
            rows=theoretical.rows()))
        if config.n_range is not None and theoretical.n_bound.value is not None:
            consistent = (n_star is not None
                          and n_star <= theoretical.n_bound.value)

    rec_tuple = tuple(records)
    return ExperimentReport(
        config=config, resolved_D=ring.D, levels=(ring.D, ring.D + config.delta),
        records=rec_tuple, n_star=n_star, theoretical=theoretical,
        bound_consistent=consistent,
        certification_summary=_summary(rec_tuple),
        timing_s=time.monotonic() - started)
