"""Command-line driver: reproducible experiments with CSV/JSON/figure output.

Subcommands::

    simulate   generate one sample per scenario and n, dump truth vs estimate
    audit      Monte Carlo check of the adaptive risk envelope
    lemmas     run the numerical verifier suite for the supporting bounds
    constants  tabulate the envelope constants along a sample-size sweep
    sieve      print the weight-family geometry and statistics

Exit status: 0 when every asserted inequality passes, 1 when one fails,
2 for invalid configuration or usage.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .audit import Scenario, audit_oracle, prepare_context, slow_variation_check
from .basis import DesignGrid
from .config import ExperimentConfig, default_config, parse_config
from .errors import ConfigError
from .estimator import EstimateConfig, estimate
from .lemmas import (
    CheckRow,
    check_centered_sums,
    check_penalty_dominance,
    check_projection_variance,
    check_tail_energy,
    check_variance_estimator_error,
)
from .plots import (
    save_fit_figure,
    save_margin_figure,
    save_ratio_figure,
    save_risk_figure,
    save_weights_figure,
)
from .reporting import write_csv, write_json
from .signals import NoiseSpec, VolatilitySpec, generate_sample, make_signal
from .weights import build_sieve, pinsker_family, family_stats


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetero-oracle",
        description="Adaptive regression under heteroscedastic noise, with risk-bound audits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, default=None, help="experiment config file")
        p.add_argument("--seed", type=int, default=None, help="override the base seed")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument(
            "--replications", type=int, default=None, help="override replication count"
        )
        p.add_argument(
            "--mode",
            choices=("estimated", "known"),
            default=None,
            help="noise-level handling: estimate it or use the known truth",
        )
        p.add_argument(
            "--n",
            type=str,
            default=None,
            help="comma-separated odd sample sizes (even values are rejected)",
        )

    for name, descr in (
        ("simulate", "generate and fit one sample per scenario and n"),
        ("audit", "Monte Carlo audit of the adaptive risk envelope"),
        ("lemmas", "numerical verification suite for the supporting bounds"),
        ("constants", "envelope constants along a sample-size sweep"),
        ("sieve", "weight-family geometry and statistics"),
    ):
        p = sub.add_parser(name, help=descr)
        add_common(p)
        if name == "constants":
            p.add_argument("--delta", type=float, default=0.5, help="normalization exponent")

    return parser


def _load_configs(args) -> list[ExperimentConfig]:
    if args.config is not None:
        configs = parse_config(args.config)
    else:
        configs = [default_config()]
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.n is not None:
        try:
            n_list = tuple(int(part.strip()) for part in args.n.split(",") if part.strip())
        except ValueError:
            raise ConfigError(f"field 'n': not a comma-separated integer list: {args.n!r}")
        overrides["n_list"] = n_list
    out = []
    for cfg in configs:
        cfg = dataclasses.replace(cfg, **overrides) if overrides else cfg
        cfg.validate()
        out.append(cfg)
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    configs = _load_configs(args)
    for cfg in configs:
        for n in cfg.n_list:
            scenario = cfg.build_scenario(n)
            grid = DesignGrid(n)
            sample = generate_sample(
                scenario.signal, scenario.volatility, scenario.noise, grid, cfg.seed
            )
            result, predict = estimate(
                sample,
                EstimateConfig(
                    rho=cfg.rho,
                    epsilon=cfg.epsilon,
                    k_star=cfg.k_star,
                    tail_cutoff=cfg.m_n,
                    known_variance=(cfg.mode == "known"),
                    include_all_ones=cfg.include_all_ones,
                ),
            )
            x = np.linspace(0.0, 1.0, 1000)
            s_true = scenario.signal(x)
            s_hat = predict(x)
            stem = f"simulate_{cfg.name}_n{n}"
            csv_path = write_csv(
                args.out / f"{stem}.csv",
                "simulate",
                ("x", "s_true", "s_hat"),
                zip(x.tolist(), s_true.tolist(), np.asarray(s_hat).tolist()),
            )
            save_fit_figure(
                args.out / f"{stem}.png",
                x,
                s_true,
                s_hat,
                design_x=grid.points,
                design_y=sample.y,
                title=f"{cfg.name}: n={n}, selected {result.chosen.label}",
            )
            rmse = math.sqrt(float(np.mean((np.asarray(s_hat) - s_true) ** 2)))
            print(
                f"[simulate] {cfg.name} n={n} seed={cfg.seed} "
                f"selected={result.chosen.label} rmse={rmse:.6g} -> {csv_path}"
            )
    return 0


def _cmd_audit(args) -> int:
    configs = _load_configs(args)
    all_pass = True
    for cfg in configs:
        rows = []
        details = []
        for n in cfg.n_list:
            scenario = cfg.build_scenario(n)
            report = audit_oracle(scenario, cfg.replications, cfg.seed, mode=cfg.mode)
            all_pass &= report.passed
            rows.append(
                (
                    cfg.name,
                    n,
                    report.mode,
                    report.noise,
                    report.replication_count,
                    report.seed,
                    report.nu,
                    report.constants.rho,
                    report.lhs,
                    report.adaptive_se,
                    report.oracle_risk,
                    report.rhs,
                    report.slack,
                    report.rhs + report.slack - report.lhs,
                    report.varsigma_abs_err,
                    report.constants.excess,
                    report.constants.base_remainder,
                    report.constants.remainder_total,
                    report.passed,
                )
            )
            details.append(
                {
                    "n": n,
                    "mode": report.mode,
                    "noise": report.noise,
                    "replications": report.replication_count,
                    "seed": report.seed,
                    "nu": report.nu,
                    "lhs": report.lhs,
                    "lhs_se": report.adaptive_se,
                    "rhs": report.rhs,
                    "slack": report.slack,
                    "passed": report.passed,
                    "oracle_risk": report.oracle_risk,
                    "oracle_index": report.oracle_index,
                    "per_lambda_risk": report.per_lambda_risk.tolist(),
                    "per_lambda_se": report.per_lambda_se.tolist(),
                    "varsigma_abs_err": report.varsigma_abs_err,
                    "varsigma_abs_err_se": report.varsigma_abs_err_se,
                    "constants": dataclasses.asdict(report.constants),
                    "family_stats": dataclasses.asdict(report.stats),
                }
            )
        header = (
            "scenario",
            "n",
            "mode",
            "noise",
            "replications",
            "seed",
            "nu",
            "rho",
            "lhs",
            "lhs_se",
            "oracle_risk",
            "rhs",
            "slack",
            "margin",
            "varsigma_abs_err",
            "excess",
            "base_remainder",
            "remainder_total",
            "passed",
        )
        write_csv(args.out / f"audit_{cfg.name}.csv", "audit", header, rows)
        write_json(
            args.out / f"audit_{cfg.name}.json",
            "audit",
            {"scenario": cfg.name, "results": details},
        )
        save_risk_figure(
            args.out / f"audit_{cfg.name}.png",
            [row[1] for row in rows],
            [row[8] for row in rows],
            [row[11] for row in rows],
            [row[10] for row in rows],
            title=f"risk envelope audit: {cfg.name} ({cfg.mode})",
        )
        verdict = "pass" if all(row[-1] for row in rows) else "FAIL"
        print(
            f"[audit] {cfg.name} mode={cfg.mode} n={','.join(str(n) for n in cfg.n_list)} "
            f"replications={cfg.replications} -> {verdict}"
        )
    return 0 if all_pass else 1


def _lemma_suite(cfg: ExperimentConfig) -> list[CheckRow]:
    rows = list(check_centered_sums(200, (0, 1, 2), 10_000))

    signals = [
        make_signal("sine"),
        make_signal("trigpoly"),
        make_signal("slow_sobolev", k=1),
        make_signal("slow_sobolev", k=2),
    ]
    for n in (101, 501):
        grid = DesignGrid(n)
        for sig in signals:
            rows.append(check_tail_energy(sig, grid))

    grid = DesignGrid(101)
    sine = make_signal("sine")
    rng = np.random.default_rng(cfg.seed)
    vols = {
        "constant": VolatilitySpec.constant(1.0),
        "budget": VolatilitySpec.budget(1.0, 1.0, 1.0),
    }
    for vol_name, vol in vols.items():
        vectors = [np.eye(101)[0]] + [rng.standard_normal(101) for _ in range(3)]
        for idx, v in enumerate(vectors):
            res = check_projection_variance(
                v, vol, sine, grid, mc_draws=10_000, seed=cfg.seed + idx
            )
            rows.append(
                CheckRow(
                    lemma="projection_variance",
                    case=f"{vol_name},v{idx},exact_vs_bound",
                    lhs=res.exact_var,
                    bound=res.bound,
                    margin=res.bound - res.exact_var,
                    passed=res.passed,
                )
            )

    reps = max(200, cfg.replications)
    for noise_id in ("gaussian", "rademacher"):
        res = check_variance_estimator_error(
            sine,
            VolatilitySpec.budget(1.0, 1.0, 1.0),
            NoiseSpec.named(noise_id),
            n=101,
            tail_cutoff=5,
            replications=reps,
            seed=cfg.seed,
        )
        rows.append(
            CheckRow(
                lemma="variance_error",
                case=f"{noise_id},budget,n=101",
                lhs=res.mc_mean_abs_err,
                bound=res.bound,
                margin=res.bound - res.mc_mean_abs_err,
                passed=res.passed,
            )
        )

    scenario = Scenario(
        signal=sine,
        volatility=VolatilitySpec.budget(1.0, 1.0, 1.0),
        noise=NoiseSpec.gaussian(),
        n=101,
        name="penalty",
    )
    pen = check_penalty_dominance(None, scenario, replications=reps, seed=cfg.seed)
    worst = pen.worst_index
    rows.append(
        CheckRow(
            lemma="penalty_bound",
            case=f"pinsker,n=101,worst_member={worst}",
            lhs=float(pen.per_member_lhs[worst]),
            bound=float(pen.per_member_rhs[worst] + pen.per_member_slack[worst]),
            margin=float(
                pen.per_member_rhs[worst] + pen.per_member_slack[worst] - pen.per_member_lhs[worst]
            ),
            passed=pen.passed,
        )
    )
    return rows


def _cmd_lemmas(args) -> int:
    configs = _load_configs(args)
    cfg = configs[0]
    if args.replications is None:
        cfg = dataclasses.replace(cfg, replications=500)
    rows = _lemma_suite(cfg)
    write_csv(
        args.out / "lemmas.csv",
        "lemmas",
        ("lemma", "case", "lhs", "bound", "margin", "passed"),
        ((r.lemma, r.case, r.lhs, r.bound, r.margin, r.passed) for r in rows),
    )
    worst_by_lemma = {}
    for row in rows:
        current = worst_by_lemma.get(row.lemma)
        if current is None or row.margin < current.margin:
            worst_by_lemma[row.lemma] = row
    save_margin_figure(
        args.out / "lemmas.png",
        [f"{r.lemma}: {r.case}" for r in worst_by_lemma.values()],
        [r.margin for r in worst_by_lemma.values()],
        title="worst margin per verified bound",
    )
    n_pass = sum(1 for r in rows if r.passed)
    ok = n_pass == len(rows)
    print(f"[lemmas] {n_pass}/{len(rows)} cases pass -> {args.out / 'lemmas.csv'}")
    return 0 if ok else 1


def _cmd_constants(args) -> int:
    configs = _load_configs(args)
    cfg = configs[0]
    n_list = cfg.n_list if args.n is not None else (101, 401, 1601, 6401)
    noise = NoiseSpec.named(cfg.noise_id)
    result = slow_variation_check(
        n_list,
        args.delta,
        r=1.0,
        xi_bar=noise.xi_bar,
        sigma_star=1.0,
        epsilon=cfg.epsilon,
        k_star=cfg.k_star,
    )
    header = (
        "n",
        "rho",
        "nu",
        "max_weight_sum",
        "base_remainder",
        "sobolev_remainder",
        "base_ratio",
        "sobolev_ratio",
    )
    write_csv(
        args.out / "constants.csv",
        "constants",
        header,
        ([row[key] for key in header] for row in result.rows),
    )
    save_ratio_figure(
        args.out / "constants.png",
        [row["n"] for row in result.rows],
        [row["base_ratio"] for row in result.rows],
        [row["sobolev_ratio"] for row in result.rows],
        args.delta,
        title=f"remainder growth, delta={args.delta:g}",
    )
    ok = result.base_tail_decreasing and result.sobolev_tail_decreasing
    print(
        f"[constants] n={','.join(str(row['n']) for row in result.rows)} "
        f"delta={args.delta:g} tail_decreasing={'yes' if ok else 'NO'}"
    )
    return 0 if ok else 1


def _cmd_sieve(args) -> int:
    configs = _load_configs(args)
    cfg = configs[0]
    status = 0
    for n in cfg.n_list:
        plan = build_sieve(n, epsilon=cfg.epsilon, k_star=cfg.k_star)
        family = pinsker_family(n, plan, include_all_ones=cfg.include_all_ones)
        stats = family_stats(family)
        rows = []
        for member in family.members:
            label = member.label
            if label is not None and len(label) == 2:
                beta, t = label
                omega = (
                    ((beta + 1) * (2 * beta + 1) / (math.pi ** (2 * beta) * beta)) * t * n
                ) ** (1.0 / (2 * beta + 1))
                j0 = math.floor(omega / math.log(n))
            else:
                beta, t, omega, j0 = "", "", "", ""
            rows.append((beta, t, omega, j0, member.total, member.sq_norm))
        write_csv(
            args.out / f"sieve_n{n}.csv",
            "sieve",
            ("beta", "t", "omega", "j0", "weight_sum", "weight_sq_norm"),
            rows,
        )
        save_weights_figure(
            args.out / f"sieve_n{n}.png", family, title=f"weight family, n={n}"
        )
        print(
            f"[sieve] n={n} epsilon={plan.epsilon:.6g} k_star={plan.k_star} m={plan.m} "
            f"nu={plan.nu} members={family.nu} max_weight_sum={stats.max_weight_sum:.6g} "
            f"centered_sup_1={stats.centered_sup_1:.6g} centered_sup_2={stats.centered_sup_2:.6g}"
        )
        if plan.nu + (1 if cfg.include_all_ones else 0) != family.nu:
            status = 1
    return status


_COMMANDS = {
    "simulate": _cmd_simulate,
    "audit": _cmd_audit,
    "lemmas": _cmd_lemmas,
    "constants": _cmd_constants,
    "sieve": _cmd_sieve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
