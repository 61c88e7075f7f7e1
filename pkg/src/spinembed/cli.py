"""Experiment harness.

Subcommands: embed (single parameter point), sweep (adversary-strength
sweep), rainbow (polychromatic pipeline), check (deterministic-lemma suite).
Configuration comes from a flat key=value file, overridable by flags; every
trial derives its own seed, so serial and parallel runs write identical
JSON-lines and CSV bytes.  Wall-clock timings go to a separate sidecar that
is excluded from the determinism contract.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field, fields
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .embed import PipelineParams, full_embed
from .figures import render_rate_curve, render_stage_histogram
from .graphs import AdversarySpec, GuestSpec, adversary_delete, gen_gnp, gen_guest, verify_min_degree_ratio
from .lemma_suite import run_all
from .rainbow import rainbow_experiment
from .reporting import write_csv, write_jsonl
from .seeds import derive_seed

MODES = ("single-embed", "resilience-sweep", "polychromatic", "lemma-checks")


def compute_p(n: int, c: float, delta: int) -> float:
    """min(1, c * (ln n / n)^(1/delta)); natural log, fixed for determinism."""
    if n < 2:
        raise ValueError("need n >= 2")
    if c <= 0:
        raise ValueError("need c > 0")
    return min(1.0, c * (math.log(n) / n) ** (1.0 / delta))


@dataclass
class ExperimentConfig:
    mode: str = "single-embed"
    n: int = 400
    p: Optional[float] = None
    c_coeff: Optional[float] = None
    delta: int = 2
    gamma: float = 0.15
    adversary: str = "random-half-minus-gamma"
    guest_kind: str = "path-union"
    guest_m: Optional[int] = None
    guest_fraction: float = 0.5
    guest_beta: float = 0.02
    k: int = 1
    ks: List[int] = field(default_factory=lambda: [1])
    gammas: List[float] = field(default_factory=lambda: [0.05, 0.15, 0.25, 0.35, 0.45])
    seeds: List[int] = field(default_factory=lambda: [0])
    d: float = 0.5
    eps: float = 0.3
    eta_g: float = 0.5
    eta_h: float = 0.4
    eta_prime: float = 0.02
    t: int = 2
    r0: int = 4
    strategy: str = "refine-heuristic"
    blowup_parts: int = 1
    blowup_retries: int = 10
    mc_trials: int = 16
    density_min_size: int = 12
    check_scale: float = 1.0
    out: str = "runs/out"
    workers: int = 1
    figures: bool = True

    def host_p(self) -> float:
        if self.p is not None:
            return self.p
        if self.c_coeff is not None:
            return compute_p(self.n, self.c_coeff, self.delta)
        raise ValueError("config must set p or c_coeff")

    def guest_size(self) -> int:
        if self.guest_m is not None:
            return self.guest_m
        return max(8, int(self.guest_fraction * self.n))

    def pipeline(self) -> PipelineParams:
        return PipelineParams(
            delta=self.delta,
            d=self.d,
            eps=self.eps,
            p=self.host_p(),
            gamma=self.gamma,
            eta_g=self.eta_g,
            eta_h=self.eta_h,
            eta_prime=self.eta_prime,
            t=self.t,
            r0=self.r0,
            strategy=self.strategy,
            mc_trials=self.mc_trials,
            blowup_parts=self.blowup_parts,
            blowup_retries=self.blowup_retries,
            density_min_size=self.density_min_size,
        )

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode != "lemma-checks":
            p = self.host_p()
            if not (0 < p <= 1):
                raise ValueError("host edge probability must lie in (0, 1]")
            GuestSpec(m=self.guest_size(), delta=self.delta, beta=self.guest_beta, kind=self.guest_kind)
            if self.mode in ("single-embed", "resilience-sweep"):
                AdversarySpec(gamma=self.gamma, strategy=self.adversary)


def _parse_value(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if ".." in raw and "," not in raw:
        try:
            a, b = raw.split("..")
            return list(range(int(a), int(b) + 1))
        except ValueError:
            pass
    if "," in raw:
        return [_parse_value(tok) for tok in raw.split(",") if tok.strip()]
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def load_config(path: Path) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {line!r}")
        key, raw = line.split("=", 1)
        out[key.strip()] = _parse_value(raw)
    return out


def build_config(file_values: Dict[str, object], overrides: Dict[str, object]) -> ExperimentConfig:
    cfg = ExperimentConfig()
    valid = {f.name for f in fields(ExperimentConfig)}
    for source in (file_values, overrides):
        for key, value in source.items():
            if value is None:
                continue
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            if key in ("seeds", "gammas", "ks") and not isinstance(value, list):
                value = [value]
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _embed_trial(args: tuple) -> dict:
    cfg_dict, gamma, seed, trial = args
    cfg = ExperimentConfig(**cfg_dict)
    cfg.gamma = gamma
    t0 = time.perf_counter()
    p = cfg.host_p()
    host = gen_gnp(cfg.n, p, seed=derive_seed(seed, "host"))
    spec = AdversarySpec(gamma=gamma, strategy=cfg.adversary, seed=derive_seed(seed, "adversary"))
    thinned = adversary_delete(host, spec)
    degree_ok = verify_min_degree_ratio(host, thinned, gamma)
    guest, order = gen_guest(
        GuestSpec(m=cfg.guest_size(), delta=cfg.delta, beta=cfg.guest_beta, kind=cfg.guest_kind, seed=derive_seed(seed, "guest"))
    )
    try:
        res = full_embed(thinned, guest, order, cfg.pipeline(), seed=derive_seed(seed, "embed"))
        ok, stage = res.ok, res.stage
        summary = {
            "blowups": res.reports.get("blowups"),
            "connections": res.reports.get("connections"),
            "ladder": res.reports.get("ladder"),
            "reduced_min_degree": res.reports.get("reduced_min_degree"),
            "edge_cases": res.reports.get("edge_cases"),
        }
    except ValueError as exc:
        ok, stage, summary = False, f"precondition: {exc}", {}
    record = {
        "trial": trial,
        "mode": cfg.mode,
        "gamma": gamma,
        "seed": seed,
        "n": cfg.n,
        "p": p,
        "guest_m": guest.n,
        "host_edges": host.m,
        "kept_edges": thinned.m,
        "degree_ratio_ok": degree_ok,
        "ok": ok,
        "stage": stage,
        "stage_reports": summary,
    }
    return {"record": record, "elapsed": time.perf_counter() - t0}


def _rainbow_trial(args: tuple) -> dict:
    cfg_dict, k, seed, trial = args
    cfg = ExperimentConfig(**cfg_dict)
    t0 = time.perf_counter()
    spec = GuestSpec(m=cfg.guest_size(), delta=cfg.delta, beta=cfg.guest_beta, kind=cfg.guest_kind, seed=derive_seed(seed, "guest"))
    res = rainbow_experiment(cfg.n, k, cfg.host_p(), spec, seed=seed, params=cfg.pipeline())
    record = {
        "trial": trial,
        "mode": cfg.mode,
        "k": k,
        "seed": seed,
        "n": cfg.n,
        "p": cfg.host_p(),
        "ok": res.ok,
        "stage": res.stage,
        "rainbow": res.certificate_is_rainbow() if res.ok else False,
        "certificate_edges": len(res.rainbow_certificate) if res.rainbow_certificate else 0,
        "filter_stats": res.stats,
    }
    return {"record": record, "elapsed": time.perf_counter() - t0}


def _run_pool(worker, arg_list: List[tuple], workers: int) -> List[dict]:
    if workers <= 1 or len(arg_list) <= 1:
        return [worker(a) for a in arg_list]
    with Pool(processes=workers) as pool:
        return pool.map(worker, arg_list)


def run(config: ExperimentConfig) -> int:
    """Execute the configured mode; trial failures are data, not errors."""
    config.validate()
    out = Path(config.out)
    cfg_dict = {f.name: getattr(config, f.name) for f in fields(ExperimentConfig)}

    if config.mode == "lemma-checks":
        reports = run_all(scale=config.check_scale)
        write_jsonl(reports, out / "trials.jsonl")
        rows = [
            {"check": r["name"], "cases": r["count"], "failures": r["failures"], "passed": r["passed"]}
            for r in reports
        ]
        write_csv(rows, ["check", "cases", "failures", "passed"], out / "summary.csv")
        for r in reports:
            print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']} ({r['count']} cases)")
        return 0 if all(r["passed"] for r in reports) else 1

    if config.mode in ("single-embed", "resilience-sweep"):
        gammas = [config.gamma] if config.mode == "single-embed" else list(config.gammas)
        arg_list = []
        trial = 0
        for gamma in gammas:
            for seed in config.seeds:
                arg_list.append((cfg_dict, gamma, derive_seed(seed, "trial", gamma), trial))
                trial += 1
        results = _run_pool(_embed_trial, arg_list, config.workers)
        records = [r["record"] for r in results]
        write_jsonl(records, out / "trials.jsonl")
        rows = []
        for gamma in gammas:
            sub = [r for r in records if r["gamma"] == gamma]
            wins = sum(1 for r in sub if r["ok"])
            rows.append({"gamma": gamma, "trials": len(sub), "successes": wins,
                         "success_rate": wins / len(sub) if sub else 0.0})
        write_csv(rows, ["gamma", "trials", "successes", "success_rate"], out / "summary.csv")
        _write_timings(results, out)
        if config.figures:
            render_rate_curve(rows, "gamma", out / "fig_success_vs_gamma.png",
                              "adversary strength", "embedding success vs adversary strength")
            stages: Dict[str, int] = {}
            for r in records:
                stages[r["stage"]] = stages.get(r["stage"], 0) + 1
            render_stage_histogram(stages, out / "fig_stage_outcomes.png", "trial outcomes by stage")
        return 0

    # polychromatic
    ks = list(config.ks) if config.ks else [config.k]
    arg_list = []
    trial = 0
    for k in ks:
        for seed in config.seeds:
            arg_list.append((cfg_dict, k, derive_seed(seed, "rainbow", k), trial))
            trial += 1
    results = _run_pool(_rainbow_trial, arg_list, config.workers)
    records = [r["record"] for r in results]
    write_jsonl(records, out / "trials.jsonl")
    rows = []
    for k in ks:
        sub = [r for r in records if r["k"] == k]
        wins = sum(1 for r in sub if r["ok"] and r["rainbow"])
        rows.append({"k": k, "trials": len(sub), "successes": wins,
                     "success_rate": wins / len(sub) if sub else 0.0})
    write_csv(rows, ["k", "trials", "successes", "success_rate"], out / "summary.csv")
    _write_timings(results, out)
    if config.figures:
        render_rate_curve(rows, "k", out / "fig_success_vs_k.png",
                          "color multiplicity bound k", "rainbow embedding success vs k")
    return 0


def _write_timings(results: List[dict], out: Path) -> None:
    # wall-clock sidecar: intentionally outside the byte-determinism contract
    rows = [{"trial": r["record"]["trial"], "seconds": round(r["elapsed"], 3)} for r in results]
    write_csv(rows, ["trial", "seconds"], out / "timings.csv")


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=Path, help="flat key=value config file")
    sp.add_argument("--out", type=str)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--c-coeff", dest="c_coeff", type=float)
    sp.add_argument("--delta", type=int)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--gammas", type=str)
    sp.add_argument("--adversary", type=str, choices=AdversarySpec.STRATEGIES)
    sp.add_argument("--guest-kind", dest="guest_kind", type=str, choices=GuestSpec.KINDS)
    sp.add_argument("--guest-m", dest="guest_m", type=int)
    sp.add_argument("--guest-fraction", dest="guest_fraction", type=float)
    sp.add_argument("--guest-beta", dest="guest_beta", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--ks", type=str)
    sp.add_argument("--seeds", type=str)
    sp.add_argument("--d", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--eta-g", dest="eta_g", type=float)
    sp.add_argument("--eta-h", dest="eta_h", type=float)
    sp.add_argument("--eta-prime", dest="eta_prime", type=float)
    sp.add_argument("--t", type=int)
    sp.add_argument("--r0", type=int)
    sp.add_argument("--partition-strategy", dest="strategy", type=str, choices=("exact-tiny", "refine-heuristic"))
    sp.add_argument("--blowup-parts", dest="blowup_parts", type=int)
    sp.add_argument("--blowup-retries", dest="blowup_retries", type=int)
    sp.add_argument("--mc-trials", dest="mc_trials", type=int)
    sp.add_argument("--check-scale", dest="check_scale", type=float)
    sp.add_argument("--density-min-size", dest="density_min_size", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--no-figures", dest="figures", action="store_false", default=None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="spinembed", description="resilient-embedding experiment harness")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("embed", "sweep", "rainbow", "check"):
        _add_common_flags(subs.add_parser(name))
    args = parser.parse_args(argv)

    mode = {
        "embed": "single-embed",
        "sweep": "resilience-sweep",
        "rainbow": "polychromatic",
        "check": "lemma-checks",
    }[args.command]
    file_values = load_config(args.config) if args.config else {}
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    for key in ("seeds", "gammas", "ks"):
        if isinstance(overrides.get(key), str):
            overrides[key] = _parse_value(overrides[key])
            if not isinstance(overrides[key], list):
                overrides[key] = [overrides[key]]
    overrides["mode"] = mode
    try:
        config = build_config(file_values, overrides)
    except ValueError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
