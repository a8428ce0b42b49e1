"""Command-line entry point.

Every subcommand reads one flat ``key = value`` config file, applies
``--set key=value`` overrides, and writes its artifacts plus the resolved
config and a hash manifest to the output directory.

    sociobadge validate run.cfg --set pipeline=interpolate:75 --out results/
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import aggregate as agg
from . import io
from .core import ObservationWindow, rasterize
from .preprocess import KINDS, apply_pipeline, parse_pipeline
from .simgen import (
    DegradationParams,
    degrade,
    generate_truth,
    random_scenario,
    simulate_nominations,
)
from .stats import cohens_kappa, fit_logistic, likelihood_ratio_test, t_test_cohen_d
from .validity import ClassificationTable, ValidityMetrics, classify, metrics, sweep_combined

METRIC_COLUMNS = ("sensitivity", "specificity", "accuracy", "sum_sens_spec")


class RejectedInput(Exception):
    pass


def _require(cfg: io.RunConfig, *keys: str) -> None:
    for key in keys:
        p = cfg.path(key)
        if p is None:
            raise ValueError(f"config key {key!r} is required for this command")
        if not p.exists():
            raise FileNotFoundError(f"{key} file not found: {p}")


def _check_report(cfg: io.RunConfig, report: io.ParseReport) -> None:
    if report.rejected and not cfg.permissive:
        lines = [f"  line {ln}: {why}" for ln, why in report.rejected]
        raise RejectedInput(
            f"{report.path}: {len(report.rejected)} rejected row(s); "
            "set permissive = true to continue\n" + "\n".join(lines)
        )


def _report_table(reports) -> io.Table:
    rows = []
    for rep in reports:
        rows.append((rep.path, "", "summary", f"rows={rep.rows} accepted={rep.accepted}"))
        rows.extend(rep.entries())
    return io.Table(("file", "line", "action", "detail"), rows)


def _load_log(cfg: io.RunConfig, key: str, reports: list, window=None, roster=None):
    log, report = io.parse_edgelist(
        cfg.path(key), window if window is not None else cfg.window(),
        roster=roster if roster is not None else cfg.roster_ids(), reference_date=cfg.reference_date(),
    )
    report.path = getattr(cfg, key)
    _check_report(cfg, report)
    reports.append(report)
    return log


def _load_pair(cfg: io.RunConfig, key_a: str, key_b: str, reports: list):
    """Two logs over a shared window and roster."""
    a = _load_log(cfg, key_a, reports)
    b_probe, _ = io.parse_edgelist(
        cfg.path(key_b), cfg.window(), roster=cfg.roster_ids(), reference_date=cfg.reference_date()
    )
    window = cfg.window()
    if window is None:
        window = ObservationWindow(min(a.window.t0, b_probe.window.t0), max(a.window.t_end, b_probe.window.t_end))
    roster = sorted(set(a.roster) | set(b_probe.roster))
    reports.clear()
    a = _load_log(cfg, key_a, reports, window, roster)
    b = _load_log(cfg, key_b, reports, window, roster)
    return a, b


def _classification_table(table: ClassificationTable) -> io.Table:
    return io.Table(("cell", "seconds"), [("tp", table.tp), ("fp", table.fp), ("fn", table.fn), ("tn", table.tn), ("total", table.total)])


def _metrics_table(m: ValidityMetrics) -> io.Table:
    return io.Table(("metric", "value"), [(k, v) for k, v in m.as_dict().items()])


def _summary_rows(prefix: str, s: agg.Summary):
    return [(f"{prefix}_mean", s.mean), (f"{prefix}_sd", s.sd), (f"{prefix}_n", s.n)]


def _descriptives_table(d: agg.Descriptives) -> io.Table:
    rows = (
        _summary_rows("interaction_duration_s", d.interaction_duration)
        + _summary_rows("aggregated_dyadic_duration_min", d.aggregated_dyadic_duration)
        + _summary_rows("individual_total_duration_min", d.individual_total_duration)
    )
    return io.Table(("statistic", "value"), rows)


def _matrix_table(roster, matrix, fmt="{:.4f}") -> io.Table:
    rows = [(b, *row.tolist()) for b, row in zip(roster, matrix)]
    return io.Table(("id", *map(str, roster)), rows, fmt)


# ---------------------------------------------------------------- commands

def cmd_preprocess(cfg: io.RunConfig) -> dict:
    """Apply a strategy pipeline to an edgelist."""
    _require(cfg, "rfid")
    reports: list = []
    log = _load_log(cfg, "rfid", reports)
    processed = apply_pipeline(log, parse_pipeline(cfg.pipeline))
    out = {
        "processed.csv": _edgelist_text(processed),
        "descriptives.csv": _descriptives_table(agg.descriptives(processed)),
        "parse_report.csv": _report_table(reports),
    }
    return out


def _edgelist_text(log) -> str:
    lines = [",".join(io.EDGELIST_HEADER)]
    lines += [f"{e.start},{e.dyad.a},{e.dyad.b},{e.end}" for e in log.events]
    return "\n".join(lines) + "\n"


def cmd_validate(cfg: io.RunConfig) -> dict:
    """Classify a (processed) edgelist against a ground-truth edgelist."""
    _require(cfg, "rfid", "truth")
    reports: list = []
    measured, truth = _load_pair(cfg, "rfid", "truth", reports)
    processed = apply_pipeline(measured, parse_pipeline(cfg.pipeline))
    table = classify(rasterize(processed), rasterize(truth))
    return {
        "classification.csv": _classification_table(table),
        "metrics.csv": _metrics_table(metrics(table)),
        "parse_report.csv": _report_table(reports),
    }


def cmd_sweep(cfg: io.RunConfig) -> dict:
    """Accuracy curves over strategy cutoffs."""
    _require(cfg, "rfid", "truth")
    reports: list = []
    measured, truth = _load_pair(cfg, "rfid", "truth", reports)
    base = parse_pipeline(cfg.base_pipeline)
    out: dict = {"parse_report.csv": _report_table(reports)}
    kinds = [k.strip() for k in cfg.sweep_kinds.split(",") if k.strip()]
    for kind in kinds:
        if kind not in KINDS:
            raise ValueError(f"unknown sweep kind {kind!r}")
        values = io.parse_grid(getattr(cfg, f"sweep_{kind}"))
        result = sweep_combined(measured, truth, base, kind, values)
        rows = [("none", *_cells(result.baseline_table), *result.baseline.as_dict().values())]
        for p in result.points:
            rows.append((p.value, *_cells(p.table), *p.metrics.as_dict().values()))
        out[f"sweep_{kind}.csv"] = io.Table(("value", "tp", "fp", "fn", "tn", *METRIC_COLUMNS), rows)
    return out


def _cells(t: ClassificationTable):
    return (t.tp, t.fp, t.fn, t.tn)


def _load_nominations(cfg, roster, reports):
    respondents = None
    if cfg.respondents:
        respondents = [int(r) for r in cfg.respondents.replace(";", ",").split(",") if r.strip()]
    nom, report = io.parse_nominations(cfg.path("nominations"), roster, respondents)
    report.path = cfg.nominations
    _check_report(cfg, report)
    reports.append(report)
    return agg.symmetrize(nom, cfg.symmetrization)


def cmd_aggregate(cfg: io.RunConfig) -> dict:
    """Contact-minute matrix, descriptives and rank hit rates."""
    _require(cfg, "rfid")
    reports: list = []
    log = apply_pipeline(_load_log(cfg, "rfid", reports), parse_pipeline(cfg.pipeline))
    net = agg.aggregate_minutes(log)
    out = {
        "adjacency_minutes.csv": _matrix_table(net.roster, net.weights),
        "descriptives.csv": _descriptives_table(agg.descriptives(log)),
    }
    if cfg.nominations:
        _require(cfg, "nominations")
        nom = _load_nominations(cfg, net.roster, reports)
        y = np.where(nom.observed, nom.ties.astype(float), np.nan)
        out["nominations.csv"] = _matrix_table(nom.roster, y, "{:.0f}")
        hits = agg.rank_hit_rate(net, nom)
        out["rank_hits.csv"] = io.Table(("rank", "percent_reported", "n_egos"), [tuple(h) for h in hits], "{:.2f}")
    out["parse_report.csv"] = _report_table(reports)
    return out


def _dataset_specs(cfg):
    return [(name.strip(), [] if name.strip() == "none" else parse_pipeline(name))
            for name in cfg.datasets.split(";") if name.strip()]


def cmd_regress(cfg: io.RunConfig) -> dict:
    """Logistic models of nominations on contact minutes, per dataset."""
    _require(cfg, "rfid", "nominations")
    reports: list = []
    raw = _load_log(cfg, "rfid", reports)
    nom = _load_nominations(cfg, raw.roster, reports)
    fits, tests = {}, {}
    for name, specs in _dataset_specs(cfg):
        net = agg.aggregate_minutes(apply_pipeline(raw, specs))
        design = agg.dyad_design(net, nom)
        fits[name] = fit_logistic(design.outcome, design.minutes)
        reported = design.minutes[design.outcome == 1]
        unreported = design.minutes[design.outcome == 0]
        if reported.size >= 2 and unreported.size >= 2:
            tests[name] = t_test_cohen_d(unreported, reported)
    names = list(fits)
    keys = list(next(iter(fits.values())).summary()) if fits else []
    fit_rows = [(k, *(fits[n].summary()[k] for n in names)) for k in keys]
    out: dict = {
        "fits.csv": io.Table(("statistic", *names), fit_rows, "{:.10g}"),
        "parse_report.csv": _report_table(reports),
    }
    ref = cfg.reference_dataset
    if ref in fits:
        rows = []
        for name in names:
            if name == ref:
                continue
            lrt = likelihood_ratio_test(fits[ref], fits[name])
            rows.append((ref, name, lrt.chi2, lrt.df, lrt.p, lrt.heuristic, lrt.delta_aic))
        out["lrt.csv"] = io.Table(("model_a", "model_b", "chi2", "df", "p", "heuristic", "delta_aic"), rows, "{:.10g}")
    t_rows = [(n, t.mean0, t.mean1, t.t, t.df, t.p, t.cohen_d) for n, t in tests.items()]
    out["ttests.csv"] = io.Table(("dataset", "mean_unreported", "mean_reported", "t", "df", "p", "cohen_d"), t_rows, "{:.10g}")
    return out


def cmd_kappa(cfg: io.RunConfig) -> dict:
    """Cohen's kappa between two raters."""
    reports: list = []
    if cfg.ratings:
        _require(cfg, "ratings")
        header, rows = io._read_rows(cfg.path("ratings"))
        a = [r[0] for _, r in rows]
        b = [r[1] for _, r in rows]
        source = "ratings"
    else:
        _require(cfg, "rater_a", "rater_b")
        log_a, log_b = _load_pair(cfg, "rater_a", "rater_b", reports)
        a = rasterize(log_a).matrix.ravel().tolist()
        b = rasterize(log_b).matrix.ravel().tolist()
        source = "dyad_seconds"
    res = cohens_kappa(a, b)
    rows = [("source", source), ("n", len(a)), ("kappa", res.kappa),
            ("observed_agreement", res.observed_agreement), ("chance_agreement", res.chance_agreement)]
    out = {"kappa.csv": io.Table(("statistic", "value"), rows)}
    if reports:
        out["parse_report.csv"] = _report_table(reports)
    return out


def cmd_simulate(cfg: io.RunConfig) -> dict:
    """Synthetic truth, degraded badge data and survey nominations."""
    window = cfg.window()
    if cfg.scenario:
        _require(cfg, "scenario")
        if window is None:
            raise ValueError("simulating from a scenario file needs window_start and window_end")
        scenario = io.parse_scenario(cfg.path("scenario"), cfg.n, window)
    else:
        t0 = window.t0 if window else 0
        duration = window.seconds if window else cfg.duration
        scenario = random_scenario(cfg.n, duration, cfg.seed, t0=t0, min_dyad_gap_s=cfg.min_dyad_gap)
    truth = generate_truth(scenario, cfg.seed)
    params = DegradationParams(cfg.gap_mean, cfg.gap_max, cfg.dropout_rate, cfg.quantum, cfg.seed)
    measured = degrade(truth, params)
    scen_path_text = io.Table(("start", "end", "members"),
                              [(g.start, g.end, " ".join(map(str, sorted(g.members)))) for g in scenario.groups])
    out = {
        "scenario.csv": scen_path_text,
        "truth.csv": _edgelist_text(truth),
        "measured.csv": _edgelist_text(measured),
    }
    if cfg.nomination_slope or cfg.nomination_intercept:
        nom = simulate_nominations(agg.aggregate_minutes(truth), cfg.nomination_intercept,
                                   cfg.nomination_slope, cfg.seed, cfg.respond_prob)
        lines = ["ego,alter"]
        for k, ego in enumerate(nom.roster):
            if ego not in nom.respondents:
                continue
            alters = [nom.roster[j] for j in np.flatnonzero(nom.ties[k])]
            lines += [f"{ego},{a}" for a in alters] or [f"{ego},"]
        out["nominations.csv"] = "\n".join(lines) + "\n"
    return out


COMMANDS: dict[str, Callable[[io.RunConfig], dict]] = {
    "preprocess": cmd_preprocess,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "aggregate": cmd_aggregate,
    "regress": cmd_regress,
    "kappa": cmd_kappa,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sociobadge", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).strip().split("\n")[0])
        p.add_argument("config", nargs="?", help="flat key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help="output directory (overrides config and SOCIOBADGE_OUT_DIR)")
        p.add_argument("--seed", type=int, help="random seed override")
        p.add_argument("--permissive", action="store_true", help="continue past rejected input rows")
    return parser


def load_config(args) -> io.RunConfig:
    values: dict[str, str] = {}
    base_dir = None
    if args.config:
        values.update(io.read_config(args.config))
        base_dir = Path(args.config).parent
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.permissive:
        values["permissive"] = "true"
    cfg = io.RunConfig.from_mapping(values, base_dir)
    cfg.out_dir = io.out_dir_override(cfg.out_dir)
    if args.out:
        cfg.out_dir = args.out
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        io.ensure_writable(cfg.out_dir)
        results = COMMANDS[args.command](cfg)
        results["config.resolved.txt"] = f"command = {args.command}\n" + cfg.to_text()
        manifest = io.emit_outputs(results, cfg.out_dir)
    except RejectedInput as exc:
        print(f"sociobadge: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"sociobadge: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.entries)} file(s) to {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
