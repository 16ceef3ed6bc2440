"""Command-line front end.

    spillplan validate FILE
    spillplan solve FILE [--solver staged|brute|both] [--out DIR] [--format text|machine]
    spillplan explain FILE [--out DIR]
    spillplan trace FILE --policy NAME [--observe-at J] [--out DIR]

Exit status: 0 on success, 1 for unreadable or invalid input, 2 when the
scenario is degenerate (no oil reaches a sensitive area without controls).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .backbone import BackboneError, build_backbone, render_backbone
from .scenario import Scenario, ScenarioError, ScenarioValidationError, load_scenario
from .solver import (
    NONE_POLICY,
    DegenerateScenarioError,
    PlanModel,
    SolveResult,
    backward_induct,
    brute_force,
    parse_policy_name,
    policy_names,
)
from .trajectory import run_trajectory

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    scenario_path: Path
    output_dir: Path | None = None
    format: str = "text"
    solver: str = "staged"

    def __post_init__(self):
        if self.solver == "both" and self.format != "machine":
            raise ValueError("--solver both emits a comparison record and needs --format machine")


def _err(msg: str) -> None:
    print(f"spillplan: {msg}", file=sys.stderr)


def _load(cfg: RunConfig) -> Scenario:
    return load_scenario(cfg.scenario_path)


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def cmd_validate(cfg: RunConfig) -> int:
    s = _load(cfg)
    print(
        f"ok: {s.n} sectors, {len(s.sensitive_targets)} sensitive, "
        f"{len(s.inventory.booms)} booms, horizon {s.horizon_T}"
    )
    return EXIT_OK


def _summary(result: SolveResult) -> str:
    return f"optimal policy {result.optimal_policy.name}: {result.value:.4f} of the no-action impact"


def cmd_solve(cfg: RunConfig) -> int:
    s = _load(cfg)
    b = build_backbone(s)
    PlanModel(s, b)  # raises early on a degenerate scenario
    out = cfg.output_dir
    if cfg.solver == "both":
        brute = brute_force(s, b)
        staged = backward_induct(s, b)
        record = {
            "brute": brute.to_dict(),
            "staged": staged.to_dict(),
            "argmin_identical": brute.optimal_policy == staged.optimal_policy,
            "value_delta": abs(brute.value - staged.value),
            "summary": (
                f"{_summary(staged)}; {brute.evaluations_bruteforce} vs "
                f"{staged.evaluations_staged} evaluations"
            ),
        }
        text = json.dumps(record, sort_keys=True, indent=2) + "\n"
        _write(out, "solve_result.json", text)
        sys.stdout.write(text)
        return EXIT_OK

    result = brute_force(s, b) if cfg.solver == "brute" else backward_induct(s, b)
    _write(out, "solve_result.json", result.to_json())
    stage2, stage1 = result.stage_tables
    _write(out, "table_stage2.txt", stage2.render())
    _write(out, "table_stage1.txt", stage1.render())
    if cfg.format == "machine":
        sys.stdout.write(result.to_json())
        return EXIT_OK
    count = result.evaluations_bruteforce if cfg.solver == "brute" else result.evaluations_staged
    print(stage2.render())
    print(stage1.render())
    print(f"{_summary(result)} ({cfg.solver}, {count} evaluations)")
    return EXIT_OK


def cmd_explain(cfg: RunConfig) -> int:
    s = _load(cfg)
    text = render_backbone(build_backbone(s))
    _write(cfg.output_dir, "backbone.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_trace(cfg: RunConfig, policy_name: str, observe_at: int | None = None) -> int:
    s = _load(cfg)
    b = build_backbone(s)
    valid = policy_names(b)
    if policy_name == "none":
        policy_name = NONE_POLICY.name
    if policy_name not in valid:
        _err(f"unknown policy {policy_name!r}; valid names:\n  " + "\n  ".join(valid))
        return EXIT_INPUT
    if observe_at is not None and not 0 <= observe_at < s.horizon_T:
        _err(f"--observe-at must lie in [0, {s.horizon_T})")
        return EXIT_INPUT
    p = parse_policy_name(policy_name)
    d = b.deployment(b.first_action(p.first_boom), p.aircraft, b.second_boom(p.second_boom))
    out = cfg.output_dir if cfg.output_dir is not None else Path(".")
    traces = [("blind", run_trajectory(s, d))]
    if observe_at is not None:
        traces.append(("observed", run_trajectory(s, d, observe_at=observe_at)))
    for regime, trace in traces:
        name = f"trace_{policy_name}_{regime}.csv"
        _write(out, name, trace.to_csv())
        print(f"wrote {out / name} ({len(trace.states)} periods x {len(trace.sector_ids)} sectors)")
    if observe_at is not None:
        blind, seen = traces[0][1].support(observe_at), traces[1][1].support(observe_at)
        print(f"period {observe_at}: blind support {len(blind)} sectors, observed {len(seen)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spillplan", description="Two-period oil-spill response planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")

    p = sub.add_parser("solve", help="optimise the response plan")
    p.add_argument("scenario")
    p.add_argument("--solver", choices=("staged", "brute", "both"), default="staged")
    p.add_argument("--out", type=Path, default=None, help="directory for artifacts")
    p.add_argument("--format", choices=("text", "machine"), default="text")

    p = sub.add_parser("explain", help="show the decision backbone and pruning")
    p.add_argument("scenario")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("trace", help="write per-period oil traces as CSV")
    p.add_argument("scenario")
    p.add_argument("--policy", required=True, help="policy name, e.g. stabilize-disperse-stabilize or none")
    p.add_argument("--observe-at", type=int, default=None, help="also write the trace observed at this period")
    p.add_argument("--out", type=Path, default=None, help="directory for CSVs (default: current directory)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            scenario_path=Path(args.scenario),
            output_dir=getattr(args, "out", None),
            format=getattr(args, "format", "text"),
            solver=getattr(args, "solver", "staged"),
        )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        if cfg.command == "validate":
            return cmd_validate(cfg)
        if cfg.command == "solve":
            return cmd_solve(cfg)
        if cfg.command == "explain":
            return cmd_explain(cfg)
        return cmd_trace(cfg, args.policy, args.observe_at)
    except ScenarioValidationError as exc:
        _err("invalid scenario:\n  " + "\n  ".join(exc.violations))
        return EXIT_INPUT
    except (ScenarioError, BackboneError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    except DegenerateScenarioError as exc:
        _err(f"degenerate scenario: {exc}")
        return EXIT_DEGENERATE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
