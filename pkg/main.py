# main.py

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, field, fields
from typing import List, Optional

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np

from config import (
    DEFAULT_ALPHA,
    DEFAULT_JOBS,
    DEFAULT_SEED,
    EXPERIMENTS,
    FOUR_ARM_GRID,
    MAX_ALPHA,
    MAX_SECONDS,
    NLAMBDA_REPLICAS,
    NLAMBDA_SIZES,
    QUASI_GRID,
    RESULTS_DIR,
    SEED_ENV_VAR,
    TWO_ARM_GRID,
    VERIFY_CHECKS,
)
from scheduler import BudgetError, record_run
from snapshot import write_frame, write_records, write_snapshot

from clusters import ArmEventKind, check_radii, cluster_frame, decompose_discrete, decompose_metric
from experiments import (
    Estimate,
    estimate_arm,
    estimate_gff_segment_connection,
    estimate_N_lambda,
    estimate_outer_boundary_event,
    estimate_point_connection,
    estimate_surrounding_loop,
    fit_exponent,
    quasi_mult_ratio,
    resistance_drops,
    verify_resistance_drop,
)
from gff import edge_frame, extend_to_metric, field_frame, sample_gff
from lattice import parse_descriptor, segment
from potential import PotentialSolver, constant_boundary, indicator_boundary
from rwls import build_vertex_laws, sample_rwls, write_soup

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3

KINDS = ["four", "two-plus"]
SETTINGS = ["metric", "discrete"]


@dataclass
class RunConfig:
    experiment: str
    kind: str = "four"
    setting: str = "metric"
    n: List[int] = field(default_factory=list)
    k: List[int] = field(default_factory=list)
    alpha: float = DEFAULT_ALPHA
    replicas: object = "auto"
    seed: int = DEFAULT_SEED
    output_dir: str = RESULTS_DIR
    jobs: Optional[int] = DEFAULT_JOBS
    max_seconds: Optional[float] = MAX_SECONDS
    check: str = "resistance-drop"
    c: List[float] = field(default_factory=lambda: [0.1])
    mode: str = "vary-k"
    what: str = "gff"
    domain: str = "box 8"

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not (0 < self.alpha <= MAX_ALPHA):
            raise ValueError(f"alpha must lie in (0, {MAX_ALPHA}], got {self.alpha}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}; expected one of {SETTINGS}")
        if self.experiment == "verify" and self.check not in VERIFY_CHECKS:
            raise ValueError(f"unknown check {self.check!r}; expected one of {VERIFY_CHECKS}")
        if self.replicas != "auto":
            if int(self.replicas) <= 0:
                raise ValueError(f"replicas must be positive or 'auto', got {self.replicas}")
            self.replicas = int(self.replicas)
        if self.mode not in ("vary-k", "vary-n"):
            raise ValueError(f"unknown fit mode {self.mode!r}")
        if self.what not in ("soup", "gff"):
            raise ValueError(f"unknown sample kind {self.what!r}")
        if self.experiment in ("arm", "fit", "quasi") or (self.experiment == "verify" and self.check in ("resistance-drop", "segment")):
            for k, n in self.pairs():
                check_radii(k, n)

    def pairs(self) -> list:
        if len(self.n) == 1:
            return [(k, self.n[0]) for k in self.k]
        if len(self.k) == 1:
            return [(self.k[0], n) for n in self.n]
        if len(self.k) == len(self.n):
            return list(zip(self.k, self.n))
        raise ValueError(f"cannot pair k={self.k} with n={self.n}")

    def mean_replicas(self) -> int:
        """Replica count for mean-valued statistics, where "auto" has no hit rate to plan from."""
        return NLAMBDA_REPLICAS if self.replicas == "auto" else int(self.replicas)


# --- config assembly


def _int_list(text) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(" ", "").split(",") if v]


def _float_list(text) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _replicas(text):
    return "auto" if str(text).strip().lower() == "auto" else int(text)


def _optional_float(text):
    return None if str(text).strip().lower() in ("", "none") else float(text)


PARSERS = {
    "n": _int_list,
    "k": _int_list,
    "c": _float_list,
    "alpha": float,
    "seed": int,
    "jobs": lambda t: None if str(t).strip().lower() in ("", "none") else int(t),
    "max_seconds": _optional_float,
    "replicas": _replicas,
}


def read_config_file(path: str) -> dict:
    """key = value lines (no section header needed); '#' comments allowed."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[run]\n" + text)
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, val in cp["run"].items():
        name = key.replace("-", "_")
        if name == "output":
            name = "output_dir"
        if name not in known:
            raise ValueError(f"{path}: unknown key {key!r}")
        out[name] = PARSERS.get(name, str)(val)
    return out


def default_geometry(experiment: str, kind: str, check: str) -> dict:
    if experiment == "fit":
        grid = FOUR_ARM_GRID if kind == "four" else TWO_ARM_GRID
        return {"n": [grid["n"]], "k": list(grid["k"])}
    if experiment == "quasi":
        return {"k": [k for k, _ in QUASI_GRID], "n": [n for _, n in QUASI_GRID]}
    if experiment == "nlambda":
        return {"n": list(NLAMBDA_SIZES), "k": []}
    if experiment == "verify":
        if check == "segment":
            return {"n": [TWO_ARM_GRID["n"]], "k": list(TWO_ARM_GRID["k"])}
        if check == "surrounding":
            return {"n": [], "k": [8, 16, 32]}
        if check in ("low1",):
            return {"n": [16, 32, 64], "k": []}
        if check == "outer-boundary":
            return {"n": list(NLAMBDA_SIZES), "k": []}
        return {"n": [32], "k": [8]}
    if experiment == "sample":
        return {"n": [], "k": []}
    return {"n": [32], "k": [8]}


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = PARSERS[f.name](v) if f.name in PARSERS and isinstance(v, str) else v
    values["experiment"] = args.command

    if "seed" not in values:
        env = os.environ.get(SEED_ENV_VAR)
        values["seed"] = int(env) if env else DEFAULT_SEED

    geo = default_geometry(args.command, values.get("kind", "four"), values.get("check", "resistance-drop"))
    values.setdefault("n", geo["n"])
    values.setdefault("k", geo["k"])
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loopsoup", description="Loop soup and metric GFF arm-event toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value config file; flags override it")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--replicas", help="count or 'auto'")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--max-seconds", dest="max_seconds", type=float)
        sp.add_argument("--out", dest="output_dir")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--setting", choices=SETTINGS)

    arm = sub.add_parser("arm", help="estimate one arm-event probability")
    common(arm)
    arm.add_argument("--kind", choices=KINDS)
    arm.add_argument("--n")
    arm.add_argument("--k")

    fit = sub.add_parser("fit", help="arm probabilities over a grid plus exponent fit")
    common(fit)
    fit.add_argument("--kind", choices=KINDS)
    fit.add_argument("--n", help="comma list")
    fit.add_argument("--k", help="comma list")
    fit.add_argument("--mode", choices=["vary-k", "vary-n"])

    quasi = sub.add_parser("quasi", help="quasi-multiplicativity ratios")
    common(quasi)
    quasi.add_argument("--n", help="comma list, paired with --k")
    quasi.add_argument("--k", help="comma list, paired with --n")

    nl = sub.add_parser("nlambda", help="N(Λ) statistic")
    common(nl)
    nl.add_argument("--n", help="comma list")
    nl.add_argument("--k", help="comma list (discrete setting)")

    ver = sub.add_parser("verify", help="boundary-value and landmark-event checks")
    common(ver)
    ver.add_argument("--check", choices=VERIFY_CHECKS)
    ver.add_argument("--n")
    ver.add_argument("--k")
    ver.add_argument("--c", help="threshold(s) for resistance-drop, comma list")

    smp = sub.add_parser("sample", help="export one soup or field sample")
    common(smp)
    smp.add_argument("--what", choices=["soup", "gff"])
    smp.add_argument("--domain", help="descriptor, e.g. 'box 8' or 'halfplane 16'")
    smp.add_argument("--k", help="segment half-width for gff boundary data 1 on segment(k)")

    sub.add_parser("selftest", help="fast invariant suite")
    return p


# --- experiments


def _name(cfg: RunConfig, *parts) -> str:
    bits = [cfg.experiment] + [str(p) for p in parts if p not in (None, "")]
    return "_".join(bits).replace("/", "-").replace("=", "")


def run_arm(cfg: RunConfig) -> tuple:
    ests = []
    for k, n in cfg.pairs():
        kind = ArmEventKind(cfg.kind, cfg.setting, k, n)
        ests.append(estimate_arm(kind, cfg.replicas, cfg.seed, alpha=cfg.alpha, jobs=cfg.jobs, max_seconds=cfg.max_seconds))
    return _name(cfg, cfg.kind, cfg.setting), [e.to_record() for e in ests], [e.to_row() for e in ests]


def run_fit(cfg: RunConfig) -> tuple:
    power = 2 if cfg.kind == "four" else 1
    ests = {}
    for k, n in cfg.pairs():
        kind = ArmEventKind(cfg.kind, cfg.setting, k, n)
        ests[(k, n)] = estimate_arm(kind, cfg.replicas, cfg.seed, alpha=cfg.alpha, jobs=cfg.jobs, max_seconds=cfg.max_seconds)

    label = f"fit/{cfg.kind}/{cfg.setting}/{cfg.mode}"
    fit = fit_exponent(ests, cfg.mode, label=label)
    fit.params = {"kind": cfg.kind, "setting": cfg.setting}
    records = [e.to_record() for e in ests.values()] + [fit.to_record()]
    print(f"[Fit] {label}: {fit.summary()}")

    if cfg.kind == "four":
        loose = {
            key: Estimate(e.label + "/unfiltered", e.extras["unfiltered_mean"], e.extras["unfiltered_std_error"],
                          e.replicas, e.seed, params=dict(e.params))
            for key, e in ests.items()
        }
        try:
            lfit = fit_exponent(loose, cfg.mode, label=label + "/unfiltered")
            lfit.params = {"kind": cfg.kind, "setting": cfg.setting, "outermost": False}
            records.append(lfit.to_record())
            print(f"[Fit] {lfit.label}: {lfit.summary()}")
        except ValueError as e:
            print(f"[Fit] unfiltered fit skipped: {e}")

    rows = []
    for (k, n), e in ests.items():
        row = e.to_row()
        row["normalized"] = e.mean * (n / k) ** power
        rows.append(row)
    return _name(cfg, cfg.kind, cfg.setting), records, rows


def run_quasi(cfg: RunConfig) -> tuple:
    results = [quasi_mult_ratio(n, k, cfg.replicas, cfg.seed, setting=cfg.setting, jobs=cfg.jobs,
                                max_seconds=cfg.max_seconds) for k, n in cfg.pairs()]
    return _name(cfg, cfg.setting), [r.to_record() for r in results], [r.to_row() for r in results]


def run_nlambda(cfg: RunConfig) -> tuple:
    reps = cfg.mean_replicas()
    ests = []
    if cfg.setting == "metric":
        for n in cfg.n:
            ests.append(estimate_N_lambda(n, reps, cfg.seed, setting="metric", jobs=cfg.jobs))
    else:
        for n in cfg.n:
            for k in cfg.k or [1]:
                ests.append(estimate_N_lambda(n, reps, cfg.seed, setting="discrete", k=k, alpha=cfg.alpha, jobs=cfg.jobs))
    return _name(cfg, cfg.setting), [e.to_record() for e in ests], [e.to_row() for e in ests]


def run_verify(cfg: RunConfig) -> tuple:
    records, rows = [], []
    if cfg.check == "resistance-drop":
        for k, n in cfg.pairs():
            drops = resistance_drops(n, k, cfg.replicas, cfg.seed, jobs=cfg.jobs, max_seconds=cfg.max_seconds,
                                     threshold=min(cfg.c))
            for c in cfg.c:
                est, analytic = verify_resistance_drop(n, k, c, len(drops), cfg.seed, drops=drops)
                records.append(est.to_record())
                rows.append({**est.to_row(), "analytic": analytic})
    elif cfg.check == "segment":
        ests = {}
        for k, n in cfg.pairs():
            e = estimate_gff_segment_connection(n, k, cfg.replicas, cfg.seed, jobs=cfg.jobs, max_seconds=cfg.max_seconds)
            ests[(k, n)] = e
            records.append(e.to_record())
            rows.append({**e.to_row(), "normalized": e.mean * n / k})
        if len(ests) >= 3:
            fit = fit_exponent(ests, "vary-k", label="fit/segment")
            records.append(fit.to_record())
            print(f"[Fit] segment: {fit.summary()}")
    elif cfg.check == "low1":
        for n in cfg.n:
            e = estimate_point_connection(n, cfg.replicas, cfg.seed, jobs=cfg.jobs, max_seconds=cfg.max_seconds)
            records.append(e.to_record())
            rows.append({**e.to_row(), "normalized": e.mean * n})
    elif cfg.check == "surrounding":
        for k in cfg.k:
            e = estimate_surrounding_loop(k, cfg.replicas, cfg.seed, alpha=cfg.alpha, jobs=cfg.jobs)
            records.append(e.to_record())
            rows.append(e.to_row())
    elif cfg.check == "outer-boundary":
        for n in cfg.n:
            e = estimate_outer_boundary_event(n, cfg.replicas, cfg.seed, setting=cfg.setting, alpha=cfg.alpha, jobs=cfg.jobs)
            records.append(e.to_record())
            rows.append(e.to_row())
    return _name(cfg, cfg.check), records, rows


def run_sample(cfg: RunConfig) -> tuple:
    domain = parse_descriptor(cfg.domain)
    rng = np.random.default_rng(cfg.seed)
    base = os.path.join(cfg.output_dir, _name(cfg, cfg.what, cfg.seed))

    if cfg.what == "soup":
        sample = sample_rwls(build_vertex_laws(domain), cfg.alpha, rng)
        sample.seed = cfg.seed
        decomp = decompose_discrete(sample)
        write_soup(sample, base + "_loops.txt")
        record = {"type": "sample", "what": "soup", "domain": cfg.domain, "alpha": cfg.alpha,
                  "seed": cfg.seed, "loops": len(sample), "clusters": len(decomp)}
    else:
        solver = PotentialSolver(domain)
        data = indicator_boundary(solver, segment(cfg.k[0])) if cfg.k else constant_boundary(solver, 0.0)
        metric = extend_to_metric(sample_gff(solver, data, rng), rng)
        decomp = decompose_metric(metric)
        write_frame(field_frame(metric.field), base + "_field.csv")
        write_frame(edge_frame(metric), base + "_edges.csv")
        record = {"type": "sample", "what": "gff", "domain": cfg.domain, "seed": cfg.seed,
                  "open_edges": int(metric.edge_open.sum()), "clusters": len(decomp)}
    write_frame(cluster_frame(decomp), base + "_clusters.csv")
    write_records([record], base + ".jsonl")
    print(f"[Sample] {cfg.what} on {domain!r}: {len(decomp)} clusters -> {base}_*")
    return None, [record], []


def selftest() -> int:
    import pytest

    tests = os.path.join(PROJECT_ROOT, "tests")
    print("[Run] selftest: fast invariant suite")
    return int(pytest.main(["-q", "-m", "not slow", tests]))


DISPATCH = {
    "arm": run_arm,
    "fit": run_fit,
    "quasi": run_quasi,
    "nlambda": run_nlambda,
    "verify": run_verify,
    "sample": run_sample,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one experiment, write its JSON-lines + CSV outputs, return an exit status."""
    try:
        if cfg.experiment == "selftest":
            return selftest()
        cfg.validate()
        name, records, rows = DISPATCH[cfg.experiment](cfg)
        if name is not None:
            json_path, csv_path = write_snapshot(name, records, rows, out_dir=cfg.output_dir)
            print(f"[Run] {len(records)} records -> {json_path}, {len(rows)} rows -> {csv_path}")
        record_run(cfg.experiment, {"seed": cfg.seed, "records": len(records), "output_dir": cfg.output_dir})
        return EXIT_OK
    except BudgetError as e:
        print(f"[Error] budget: {e}")
        return EXIT_BUDGET
    except ValueError as e:
        print(f"[Error] {e}")
        return EXIT_INVALID
    except (RuntimeError, OSError) as e:
        print(f"[Error] {type(e).__name__}: {e}")
        return EXIT_FAILURE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return selftest()
    try:
        cfg = build_config(args)
    except (ValueError, OSError) as e:
        print(f"[Error] {e}")
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
