"""Manifest-driven command line front end.

A manifest is a flat, sectioned key-value file (``configparser`` syntax)
that fully determines a run: the ring, named ideals, and one task.  All
randomness flows from the manifest seed, so reports are artifacts of
record: re-running a manifest reproduces byte-identical CSV output.

Exit codes: 0 clean, 1 at least one violated verdict, 2 operational error.
A computed falsehood (e.g. ``check-filter-regular`` answering "false") is a
result, not a violation.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import sys
import time
from dataclasses import dataclass, field, replace

from .errors import ManifestError, PertlabError
from .harness import (ExperimentConfig, RingSpec, find_min_N, resolve_ring,
                      run_experiment, sample_in_power)
from .ideals import IdealHandle
from .invariants import (filter_regular_sequence_check, gr_hilbert_function,
                         hs_table, koszul_report)
from .verifiers import (VIOLATED, VERIFIED, VerdictRecord, Workspace,
                        bound_N_one_element, check_control_colon,
                        check_main_equality, check_perturbed_filter_regular,
                        check_surjection_monotonicity, inputs_digest, _row)

FORMAT_VERSION = 1

CSV_COLUMNS = ("claim", "N", "sample", "n", "value_orig", "value_pert",
               "status", "certification", "seed")

COMMANDS = ("check-filter-regular", "hilbert", "ar-number", "koszul",
            "bound-n", "verify", "find-min-n", "experiment")

VERIFY_CLAIMS = ("main", "monotonicity", "control-colon", "preservation")


@dataclass(frozen=True)
class TaskSpec:
    command: str
    f: tuple[str, ...] = ()
    j: str = ""
    n_max: int | None = None
    n_range: tuple[int, int] | None = None
    n_single: int | None = None
    samples: int | None = None
    seed: int | None = None
    delta: int | None = None
    claim: str | None = None
    epsilon: tuple[str, ...] | None = None
    catalog: str | None = None


@dataclass(frozen=True)
class Manifest:
    format_version: int
    ring: RingSpec | None
    ideals: tuple[tuple[str, tuple[str, ...]], ...]
    task: TaskSpec


def _split_list(value: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in value.split(",") if p.strip())
    return parts


def parse_manifest(text: str) -> Manifest:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case (D, N)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ManifestError(f"manifest parse error: {exc}") from exc

    if not cp.has_section("manifest") or not cp.has_option("manifest",
                                                           "format-version"):
        raise ManifestError("missing [manifest] section with format-version")
    version = int(cp.get("manifest", "format-version"))
    if version != FORMAT_VERSION:
        raise ManifestError(f"unsupported format-version {version}")

    ring = None
    if cp.has_section("ring"):
        try:
            p = int(cp.get("ring", "p"))
            vars_ = _split_list(cp.get("ring", "vars"))
        except (configparser.NoOptionError, ValueError) as exc:
            raise ManifestError(f"bad ring section: {exc}") from exc
        gens = _split_list(cp.get("ring", "gens", fallback=""))
        d_raw = cp.get("ring", "D", fallback="auto").strip()
        d = None if d_raw == "auto" else int(d_raw)
        ring = RingSpec(p, vars_, gens, d)

    ideals = []
    if cp.has_section("ideals"):
        for name, value in cp.items("ideals"):
            ideals.append((name, _split_list(value)))

    if not cp.has_section("task") or not cp.has_option("task", "command"):
        raise ManifestError("missing [task] section with a command")
    command = cp.get("task", "command").strip()
    if command not in COMMANDS:
        raise ManifestError(f"unknown command {command!r}; known: "
                            + ", ".join(COMMANDS))

    def opt_int(key: str) -> int | None:
        return int(cp.get("task", key)) if cp.has_option("task", key) else None

    n_range = None
    n_single = None
    if cp.has_option("task", "N"):
        raw = cp.get("task", "N").strip()
        if ".." in raw:
            lo, hi = raw.split("..", 1)
            n_range = (int(lo), int(hi))
        else:
            n_single = int(raw)

    task = TaskSpec(
        command=command,
        f=_split_list(cp.get("task", "f", fallback="")),
        j=cp.get("task", "J", fallback="").strip(),
        n_max=opt_int("n_max"),
        n_range=n_range,
        n_single=n_single,
        samples=opt_int("samples"),
        seed=opt_int("seed"),
        delta=opt_int("delta"),
        claim=cp.get("task", "claim", fallback=None),
        epsilon=_split_list(cp.get("task", "epsilon"))
        if cp.has_option("task", "epsilon") else None,
        catalog=cp.get("task", "catalog", fallback=None),
    )
    return Manifest(version, ring, tuple(ideals), task)


def serialize_manifest(m: Manifest) -> str:
    lines = ["[manifest]", f"format-version = {m.format_version}", ""]
    if m.ring is not None:
        lines += ["[ring]", f"p = {m.ring.p}",
                  f"vars = {', '.join(m.ring.vars)}"]
        if m.ring.base_gens:
            lines.append(f"gens = {', '.join(m.ring.base_gens)}")
        lines.append(f"D = {'auto' if m.ring.D is None else m.ring.D}")
        lines.append("")
    if m.ideals:
        lines.append("[ideals]")
        for name, gens in m.ideals:
            lines.append(f"{name} = {', '.join(gens)}")
        lines.append("")
    t = m.task
    lines += ["[task]", f"command = {t.command}"]
    if t.catalog:
        lines.append(f"catalog = {t.catalog}")
    if t.f:
        lines.append(f"f = {', '.join(t.f)}")
    if t.j:
        lines.append(f"J = {t.j}")
    if t.n_max is not None:
        lines.append(f"n_max = {t.n_max}")
    if t.n_range is not None:
        lines.append(f"N = {t.n_range[0]}..{t.n_range[1]}")
    elif t.n_single is not None:
        lines.append(f"N = {t.n_single}")
    if t.samples is not None:
        lines.append(f"samples = {t.samples}")
    if t.seed is not None:
        lines.append(f"seed = {t.seed}")
    if t.delta is not None:
        lines.append(f"delta = {t.delta}")
    if t.claim:
        lines.append(f"claim = {t.claim}")
    if t.epsilon is not None:
        lines.append(f"epsilon = {', '.join(t.epsilon)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    command: str
    resolved_D: int
    records: tuple[VerdictRecord, ...]
    n_star: int | None = None
    theoretical_N: int | None = None
    seed: int | None = None
    timing_s: float = 0.0

    def rows(self) -> list[dict]:
        out = []
        for rec in self.records:
            out.extend(dict(r) for r in rec.rows)
        return out

    def exit_code(self) -> int:
        return 1 if any(r.outcome == VIOLATED for r in self.records) else 0


def _resolve_config(m: Manifest) -> ExperimentConfig:
    t = m.task
    if t.catalog:
        cfg = ExperimentConfig.from_catalog(t.catalog)
        if m.ring is not None and m.ring.D is not None:
            cfg = replace(cfg, ring=replace(cfg.ring, D=m.ring.D))
    else:
        if m.ring is None:
            raise ManifestError("no [ring] section and no catalog reference")
        if not t.f:
            raise ManifestError("task needs f = <comma separated expressions>")
        j_exprs = _resolve_ideal(m, t.j) if t.j else m.ring.vars
        cfg = ExperimentConfig(ring=m.ring, f_exprs=t.f, j_exprs=j_exprs)
    overrides = {}
    if t.f and t.catalog:
        overrides["f_exprs"] = t.f
    if t.j and t.catalog:
        overrides["j_exprs"] = _resolve_ideal(m, t.j)
    if t.n_max is not None:
        overrides["n_max"] = t.n_max
    if t.n_range is not None:
        overrides["n_range"] = t.n_range
    if t.samples is not None:
        overrides["samples"] = t.samples
    if t.seed is not None:
        overrides["seed"] = t.seed
    if t.delta is not None:
        overrides["delta"] = t.delta
    return replace(cfg, **overrides)


def _resolve_ideal(m: Manifest, ref: str) -> tuple[str, ...]:
    for name, gens in m.ideals:
        if name == ref:
            return gens
    # not a name: treat as inline expression list
    return _split_list(ref)


def _context(m: Manifest) -> tuple:
    """(ring, fs, j_handle, workspace) for the direct commands."""
    cfg = _resolve_config(m)
    ring = resolve_ring(cfg.ring, cfg.j_exprs, cfg.n_max)
    fs = tuple(ring.element(e) for e in cfg.f_exprs)
    j = IdealHandle(ring, tuple(ring.element(g) for g in cfg.j_exprs))
    ws = Workspace(ring, fs, j, cfg.n_max, cfg.delta)
    return cfg, ring, fs, j, ws


def _table_records(ws: Workspace, cfg: ExperimentConfig) -> list[VerdictRecord]:
    i_handle = ws.i_handle
    hs = hs_table(i_handle, ws.j, cfg.n_max, ws.powers)
    gr = gr_hilbert_function(i_handle, ws.j, cfg.n_max, ws.powers)
    records = []
    for claim, table in (("hs-table", hs), ("gr-table", gr)):
        rows = tuple(_row(claim, n=n, value_orig=e.value, status="ok",
                          certification=e.status)
                     for n, e in enumerate(table.entries))
        rows = tuple({**r, "seed": cfg.seed} for r in rows)
        records.append(VerdictRecord(
            claim, VERIFIED, None,
            inputs_digest(ws.ring, ws.fs, None, ws.j, claim),
            "exact" if table.all_certified() else "uncertified",
            note=f"convention {table.convention}", rows=rows))
    return records


def execute(m: Manifest) -> RunResult:
    started = time.monotonic()
    t = m.task
    if t.command in ("experiment", "find-min-n"):
        cfg = _resolve_config(m)
        report = run_experiment(cfg) if t.command == "experiment" \
            else find_min_N(cfg)
        return RunResult(t.command, report.resolved_D, report.records,
                         n_star=report.n_star,
                         theoretical_N=(report.theoretical.n_bound.value
                                        if report.theoretical else None),
                         seed=cfg.seed, timing_s=report.timing_s)

    cfg, ring, fs, j, ws = _context(m)

    if t.command == "check-filter-regular":
        report = filter_regular_sequence_check(fs, delta=cfg.delta)
        rows = []
        for step in report.steps:
            rows.append({**_row("filter-regular", n=step.index,
                                value_orig=step.exponent.value,
                                status="true" if step.passed else "false",
                                certification=step.exponent.status),
                         "seed": cfg.seed})
        rec = VerdictRecord(
            "filter-regular", VERIFIED, None,
            inputs_digest(ring, fs, None, None, "cli"),
            "two-level-stable",
            note=("filter-regular" if report.passed
                  else f"fails at index {report.first_failure}"),
            rows=tuple(rows))
        return RunResult(t.command, ring.D, (rec,), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    if t.command == "hilbert":
        records = _table_records(ws, cfg)
        return RunResult(t.command, ring.D, tuple(records), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    if t.command == "ar-number":
        value = ws.ar_value
        rows = ({**_row("ar-number", n=0, value_orig=value.value,
                        status="ok" if value.value is not None else "not found",
                        certification=value.status), "seed": cfg.seed},)
        rec = VerdictRecord("ar-number", VERIFIED, None,
                            inputs_digest(ring, fs, None, j, "ar"),
                            value.status, note=value.note, rows=rows)
        return RunResult(t.command, ring.D, (rec,), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    if t.command == "koszul":
        report = koszul_report(fs, delta=cfg.delta)
        rows = []
        for i, (cv, fin) in enumerate(zip(report.lengths, report.finite),
                                      start=1):
            rows.append({**_row("koszul", n=i, value_orig=cv.value,
                                status="finite" if fin else "unflagged",
                                certification=cv.status), "seed": cfg.seed})
        rec = VerdictRecord("koszul", VERIFIED, None,
                            inputs_digest(ring, fs, None, None, "koszul"),
                            "two-level-stable", rows=tuple(rows))
        return RunResult(t.command, ring.D, (rec,), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    if t.command == "bound-n":
        if len(fs) != 1:
            raise ManifestError("bound-n needs exactly one element in f")
        report = bound_N_one_element(fs[0], j, delta=cfg.delta)
        rows = tuple({**r, "seed": cfg.seed} for r in report.rows())
        rec = VerdictRecord("bound-n", VERIFIED, None,
                            inputs_digest(ring, fs, None, j, "bound"),
                            report.n_bound.status, rows=rows)
        return RunResult(t.command, ring.D, (rec,), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    if t.command == "verify":
        claim = t.claim or "main"
        if claim not in VERIFY_CLAIMS:
            raise ManifestError(f"unknown claim {claim!r}; known: "
                                + ", ".join(VERIFY_CLAIMS))
        if t.epsilon is not None:
            eps_list = [tuple(ring.element(e) for e in t.epsilon)]
        else:
            if t.n_single is None:
                raise ManifestError("verify needs either epsilon = ... or "
                                    "a single N for sampling")
            count = cfg.samples
            eps_list = [sample_in_power(ring, t.n_single, cfg.seed, len(fs),
                                        spawn=(t.n_single, s))
                        for s in range(count)]
        checker = {
            "main": check_main_equality,
            "monotonicity": check_surjection_monotonicity,
            "control-colon": check_control_colon,
            "preservation": check_perturbed_filter_regular,
        }[claim]
        records = []
        for s, eps in enumerate(eps_list):
            rec = checker(ws, eps)
            records.append(rec.with_context(t.n_single, s, cfg.seed))
        return RunResult(t.command, ring.D, tuple(records), seed=cfg.seed,
                         timing_s=time.monotonic() - started)

    raise ManifestError(f"unhandled command {t.command!r}")


def run_manifest(source: str) -> RunResult:
    """Execute a manifest given as text or a file path."""
    text = source
    if "\n" not in source and not source.lstrip().startswith("["):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    manifest = parse_manifest(text)
    return execute(manifest)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def emit_csv(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in result.rows():
        writer.writerow({k: row.get(k, "") for k in CSV_COLUMNS})
    return buf.getvalue()


def emit_table(result: RunResult) -> str:
    rows = result.rows()
    widths = {c: len(c) for c in CSV_COLUMNS}
    rendered = []
    for row in rows:
        r = {c: str(row.get(c, "")) for c in CSV_COLUMNS}
        rendered.append(r)
        for c in CSV_COLUMNS:
            widths[c] = max(widths[c], len(r[c]))
    lines = ["  ".join(c.ljust(widths[c]) for c in CSV_COLUMNS)]
    lines.append("  ".join("-" * widths[c] for c in CSV_COLUMNS))
    for r in rendered:
        lines.append("  ".join(r[c].ljust(widths[c]) for c in CSV_COLUMNS))
    lines.append("")
    lines.append(f"command: {result.command}   resolved D: {result.resolved_D}")
    outcomes: dict[str, int] = {}
    for rec in result.records:
        outcomes[rec.outcome] = outcomes.get(rec.outcome, 0) + 1
    lines.append("outcomes: " + ", ".join(f"{k}={v}"
                                          for k, v in sorted(outcomes.items())))
    if result.n_star is not None:
        lines.append(f"empirical N* = {result.n_star}")
    if result.theoretical_N is not None:
        lines.append(f"theoretical N = {result.theoretical_N}")
    lines.append(f"elapsed: {result.timing_s:.2f}s")
    return "\n".join(lines) + "\n"


def emit_report(result: RunResult, format: str) -> str:
    """Render a run in the requested format; both formats carry the same
    numeric content (the table adds a human summary footer)."""
    if format == "csv":
        return emit_csv(result)
    if format == "table":
        return emit_table(result)
    raise ValueError(f"unknown format {format!r}")


def emit_plot_data(result: RunResult) -> str:
    """(n, value) pairs per Hilbert-style table row, for external plotting."""
    lines = []
    for row in result.rows():
        claim = row.get("claim", "")
        if claim in ("hs-table", "gr-table", "main-equality", "monotonicity"):
            n = row.get("n", "")
            if n == "":
                continue
            value = row.get("value_orig", "")
            if value != "":
                lines.append(f"{claim}\t{n}\t{value}")
            pert = row.get("value_pert", "")
            if pert != "":
                lines.append(f"{claim}-pert\t{n}\t{pert}")
    return "\n".join(lines) + ("\n" if lines else "")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pertlab",
        description="Run a manifest: exact perturbation-stability "
                    "computations over truncated local rings.")
    parser.add_argument("manifest", help="path to a manifest file")
    parser.add_argument("--format", choices=("table", "csv"), default="table")
    parser.add_argument("--out", help="write the report to this file")
    parser.add_argument("--emit-plot-data", action="store_true",
                        help="append (n, value) pairs per Hilbert table")
    args = parser.parse_args(argv)
    try:
        result = run_manifest(args.manifest)
    except PertlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = emit_report(result, args.format)
    if args.emit_plot_data:
        text += "\n# plot data (claim, n, value)\n" + emit_plot_data(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return result.exit_code()


if __name__ == "__main__":
    sys.exit(main())
