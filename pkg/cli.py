#!/usr/bin/env python3
"""Loop shortening workbench - command line experiment runner.

Every command resolves a group (preset name, library entry or .pres path),
runs one finite-scale computation and prints a summary table. Verdict
commands exit 0 when the property holds up to the bound, 2 on a
counterexample and 1 on any error (budget, radius or configuration).
"""
import argparse
import itertools
import logging
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from rich.console import Console
from rich.table import Table

from budgets import get_profile, oracle_radius
from cayley import (
    DistanceOracle,
    ball_payload,
    build_ball,
    export_ball_json,
    geodesics_to,
    growth_ratios,
    is_geodesic,
)
from config import GROUPS_DIR, LOG_FORMAT, LOG_LEVEL, MEMORY_BUDGET, SEED, WORKERS, parse_memory_budget
from fellow import async_ft, sync_ft_independent, synchronize
from hnn import check_strip_equidistant, check_totally_geodesic, stable_reduced_geodesics
from library import PresentationLibrary, resolve_group
from presentation import BudgetExceeded, PremiseViolation, StuckLoop, WorkbenchError
from properties import (
    FftpMode,
    Outcome,
    Verdict,
    check_ac,
    check_ac_pair,
    check_fftp,
    check_lsp,
    dehn_upper_bound,
    fill,
    find_shortening,
)
from reports import VerdictRecord, write_csv, write_json, write_payload
from solvers import BrittonSolver
from zoo import (
    PRESET_NAMES,
    PRESET_NOTES,
    Preset,
    export_presets,
    family_loops,
    gersten_loop,
    preset,
    stallings_alpha,
    stallings_beta,
    stallings_gamma,
    table1_slice,
)

logger = logging.getLogger(__name__)
console = Console()

COMMANDS = (
    "ball", "geodesics", "check-fftp", "check-lsp", "check-blsp", "check-ac",
    "fill", "synchronize", "witness", "hnn-verify", "crosscheck",
    "table1", "presets", "export-presets",
)

# Parameters each command cannot run without.
REQUIRED = {
    "ball": ("radius",),
    "geodesics": ("word",),
    "check-fftp": ("k", "L"),
    "check-lsp": ("k", "L"),
    "check-blsp": ("k", "L"),
    "check-ac": ("N", "C"),
    "fill": ("k",),
    "synchronize": ("word", "u", "k"),
    "witness": ("n",),
    "hnn-verify": ("R",),
    "crosscheck": ("L",),
}


# =============================================================================
# CONFIG MODEL
# =============================================================================

class ExperimentConfig(BaseModel):
    """One validated command invocation."""
    command: Literal[COMMANDS]
    group: str = "wise"
    k: Optional[int] = Field(None, ge=0)
    N: Optional[int] = Field(None, ge=0)
    C: Optional[int] = Field(None, ge=0)
    L: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    R: Optional[int] = Field(None, ge=0)
    radius: Optional[int] = Field(None, ge=0)
    word: Optional[str] = None
    u: Optional[str] = None
    family: Optional[str] = None
    subgroup: Optional[str] = None
    mode: FftpMode = FftpMode.ALL_WORDS
    basepoint: bool = False
    sphere_only: bool = False
    include_elements: bool = False
    limit: int = Field(20, ge=1)
    sample: Optional[int] = Field(None, ge=1)
    output: Optional[Path] = None
    csv: Optional[Path] = None
    workers: int = Field(WORKERS, ge=1)
    memory_budget: int = Field(MEMORY_BUDGET, ge=1)
    seed: int = SEED

    @field_validator("memory_budget", mode="before")
    @classmethod
    def _parse_budget(cls, value):
        if isinstance(value, str):
            return parse_memory_budget(value)
        return value

    @model_validator(mode="after")
    def _check_required(self):
        missing = [p for p in REQUIRED.get(self.command, ()) if getattr(self, p) is None]
        if missing:
            raise ValueError(f"{self.command} needs {', '.join('--' + m for m in missing)}")
        if self.command == "fill" and self.word is None and self.L is None:
            raise ValueError("fill needs --word or --L")
        return self


@dataclass
class CommandResult:
    verdicts: list[Verdict] = field(default_factory=list)
    payload: dict[str, Any] = field(default_factory=dict)


# =============================================================================
# COMMANDS
# =============================================================================

def _oracle(config: ExperimentConfig, group: Preset, solver=None) -> DistanceOracle:
    solver = solver or group.solver
    radius = config.radius if config.radius is not None else oracle_radius(group.name)
    budget = min(config.memory_budget, get_profile(group.name)["ball_entries"])
    return DistanceOracle(solver, radius, budget=budget, workers=config.workers)


def _state_budget(group: Preset) -> int:
    return get_profile(group.name)["search_states"]


def cmd_ball(config, group):
    ball = build_ball(group.solver, config.radius, budget=config.memory_budget, workers=config.workers)
    payload = ball_payload(ball, config.include_elements)
    payload["group"] = group.name
    payload["growth_ratios"] = [round(float(x), 6) for x in growth_ratios(ball)]
    if config.output:
        export_ball_json(ball, config.output, config.include_elements)
    return CommandResult(payload=payload)


def cmd_geodesics(config, group):
    w = group.word(config.word)
    solver = group.solver
    ball = build_ball(solver, len(w), budget=config.memory_budget, workers=config.workers)
    key = solver.eval(w)
    words = [str(g) for g in itertools.islice(geodesics_to(ball, key), config.limit)]
    return CommandResult(payload={
        "group": group.name, "word": str(w), "distance": ball.distance(key), "geodesics": words,
    })


def cmd_check_fftp(config, group):
    oracle = _oracle(config, group)
    return CommandResult([check_fftp(oracle, config.k, config.L, config.mode, config.workers)])


def cmd_check_lsp(config, group, basepoint: bool = None):
    basepoint = config.basepoint if basepoint is None else basepoint
    oracle = _oracle(config, group)
    loops = None
    if config.family:
        loops = family_loops(config.family, group.name, config.k, config.L)
    verdict = check_lsp(oracle, config.k, config.L, basepoint=basepoint, loops=loops,
                        family=config.family, workers=config.workers,
                        state_budget=_state_budget(group))
    return CommandResult([verdict])


def cmd_check_blsp(config, group):
    return cmd_check_lsp(config, group, basepoint=True)


def _stallings_pair(config, group, n: int, N: int, C: int) -> Verdict:
    alpha, beta, gamma = stallings_alpha(n), stallings_beta(n), stallings_gamma()
    oracle = _oracle(config, group)
    solver = group.solver
    x, y = solver.eval(alpha), solver.eval(beta)
    verdict = check_ac_pair(oracle, x, y, N, C)
    verdict.quantifier = f"witness pair α, β at n={n}"
    verdict.witness = {
        **(verdict.witness or {}),
        "alpha": str(alpha),
        "beta": str(beta),
        "gamma": str(gamma),
        "alpha_geodesic": is_geodesic(oracle, alpha),
        "beta_geodesic": is_geodesic(oracle, beta),
        "distance": oracle.distance(x, y),
    }
    return verdict


def cmd_check_ac(config, group):
    if group.name == "stallings":
        # B(N) is out of reach; check the pair the octahedron construction predicts.
        if (config.N + 1) % 3:
            raise ValueError("stallings check-ac runs the witness pair and needs N = 3n-1")
        return CommandResult([_stallings_pair(config, group, (config.N + 1) // 3, config.N, config.C)])
    ball = build_ball(group.solver, config.N, budget=config.memory_budget, workers=config.workers)
    return CommandResult([check_ac(ball, config.N, config.C, config.sphere_only)])


def cmd_witness(config, group):
    n = config.n
    if group.name == "stallings":
        N = config.N if config.N is not None else 3 * n - 1
        C = config.C if config.C is not None else 2
        return CommandResult([_stallings_pair(config, group, n, N, C)])
    if group.name == "gersten":
        k = config.k if config.k is not None else 1
        loop = gersten_loop(n)
        oracle = _oracle(config, group)
        found = find_shortening(oracle, loop, k, basepoint=config.basepoint,
                                state_budget=_state_budget(group))
        prop = "blsp" if config.basepoint else "lsp"
        witness = None
        outcome = Outcome.HOLDS
        if found is None:
            outcome = Outcome.COUNTEREXAMPLE
            witness = {"loop": str(loop), "length": len(loop), "n": n}
        verdict = Verdict(prop, outcome, k, {"L": len(loop)}, f"single loop gersten_loop({n})", witness,
                          {"identity": group.solver.is_identity(group.solver.eval(loop))})
        return CommandResult([verdict])
    raise ValueError(f"No witness family for {group.name}; try stallings or gersten")


def cmd_fill(config, group):
    oracle = _oracle(config, group)
    if config.word is None:
        area, worst = dehn_upper_bound(oracle, config.L, config.k, sample=config.sample,
                                       seed=config.seed, state_budget=_state_budget(group))
        return CommandResult(payload={
            "group": group.name, "n": config.L, "k": config.k, "area_upper_bound": area,
            "sample": config.sample, "seed": config.seed if config.sample else None,
            "worst_word": None if worst is None else str(worst),
        })
    w = group.word(config.word)
    try:
        cert = fill(oracle, w, config.k, state_budget=_state_budget(group))
    except StuckLoop as e:
        witness = {"loop": str(e.loop), "length": len(e.loop)}
        return CommandResult([Verdict("quadratic-filling", Outcome.COUNTEREXAMPLE, config.k,
                                      {"length": len(w)}, "single word", witness)])
    ok = cert.check_bounds(group.solver)
    witness = None if ok else {"word": str(w), "area": cert.area}
    stats = {"area": cert.area, "steps": len(cert.loops) - 1,
             "max_relator_length": cert.max_relator_length}
    verdict = Verdict("quadratic-filling", Outcome.HOLDS if ok else Outcome.COUNTEREXAMPLE,
                      config.k, {"length": len(w)}, "single word", witness, stats)
    return CommandResult([verdict], payload={"relators": [str(r) for r in cert.relators]})


def cmd_synchronize(config, group):
    oracle = _oracle(config, group)
    w, u = group.word(config.word), group.word(config.u)
    phi = async_ft(oracle, w, u, config.k)
    if phi is None:
        raise PremiseViolation(f"{u} does not asynchronously {config.k}-fellow travel {w}")
    result = synchronize(oracle, w, u, phi, config.k)
    payload = result.trace()
    payload["phi"] = list(phi.values)
    payload["independent_check"] = sync_ft_independent(
        group.solver, w, result.word, result.constant - 1, start_u=result.start,
    )
    return CommandResult(payload=payload)


def cmd_hnn_verify(config, group):
    solver = group.solver
    if not isinstance(solver, BrittonSolver):
        raise ValueError(f"{group.name} is not an HNN extension")
    base_oracle = DistanceOracle(solver.base, config.R, budget=config.memory_budget, workers=config.workers)
    verdicts = [check_strip_equidistant(solver, base_oracle, config.R)]
    if config.subgroup:
        gens = [solver.base.alphabet.word(tok) for tok in config.subgroup.split()]
        verdicts.append(check_totally_geodesic(base_oracle.ball, gens, config.R))
    radius = config.radius if config.radius is not None else oracle_radius(group.name)
    ball = build_ball(solver, radius, budget=config.memory_budget, workers=config.workers)
    pinched = stable_reduced_geodesics(solver, ball)
    verdicts.append(Verdict(
        "geodesics-stable-letter-reduced",
        Outcome.HOLDS if pinched is None else Outcome.COUNTEREXAMPLE,
        None, {"radius": radius}, f"shortlex geodesics in B({radius})",
        None if pinched is None else {"geodesic": str(pinched)}, {"elements": len(ball)},
    ))
    return CommandResult(verdicts)


def cmd_crosscheck(config, group):
    """Solver identity test against ball tracing on every word up to L.

    Ball edges come from solver.step, so this checks eval against the
    letter-by-letter walk of the same solver, not against another backend.
    """
    solver = group.solver
    ball = build_ball(solver, config.L, budget=config.memory_budget, workers=config.workers)
    words = 0
    for length in range(config.L + 1):
        for letters in itertools.product(solver.alphabet.letters, repeat=length):
            w = solver.alphabet.word(letters)
            words += 1
            by_solver = solver.is_identity(solver.eval(w))
            by_ball = ball.trace(w) == solver.identity
            if by_solver != by_ball:
                witness = {"word": str(w), "solver": by_solver, "ball": by_ball}
                return CommandResult([Verdict("word-problem-agreement", Outcome.COUNTEREXAMPLE, None,
                                              {"L": config.L}, f"all words of length <= {config.L}",
                                              witness, {"words": words})])
    return CommandResult([Verdict("word-problem-agreement", Outcome.HOLDS, None, {"L": config.L},
                                  f"all words of length <= {config.L}", None, {"words": words})])


HANDLERS: dict[str, Callable[[ExperimentConfig, Preset], CommandResult]] = {
    "ball": cmd_ball,
    "geodesics": cmd_geodesics,
    "check-fftp": cmd_check_fftp,
    "check-lsp": cmd_check_lsp,
    "check-blsp": cmd_check_blsp,
    "check-ac": cmd_check_ac,
    "fill": cmd_fill,
    "synchronize": cmd_synchronize,
    "witness": cmd_witness,
    "hnn-verify": cmd_hnn_verify,
    "crosscheck": cmd_crosscheck,
}


# =============================================================================
# OUTPUT
# =============================================================================

def _print_verdicts(group: str, verdicts: list[Verdict]):
    table = Table(title=f"{group}")
    for column in ("property", "k", "bound", "outcome", "witness"):
        table.add_column(column)
    for v in verdicts:
        color = "green" if v.holds else "red"
        bound = " ".join(f"{key}={val}" for key, val in sorted(v.bound.items()))
        witness = "" if not v.witness else " ".join(f"{key}={val}" for key, val in v.witness.items())
        table.add_row(v.property, "" if v.k is None else str(v.k), bound,
                      f"[{color}]{v.outcome.value}[/{color}]", witness)
    console.print(table)


def _print_payload(payload: dict):
    table = Table(show_header=False)
    table.add_column("key")
    table.add_column("value")
    for key, value in payload.items():
        if isinstance(value, list) and len(value) > 12:
            value = f"{value[:12]} ... ({len(value)} items)"
        table.add_row(str(key), str(value))
    console.print(table)


def _record_path(output: Path, record: VerdictRecord, many: bool) -> Path:
    if not many:
        return output
    return output.with_name(f"{output.stem}.{record.property}{output.suffix or '.json'}")


def _execute(config: ExperimentConfig, group: Preset) -> tuple[CommandResult, list[VerdictRecord]]:
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    result = HANDLERS[config.command](config, group)
    wall = time.perf_counter() - t0
    records = [VerdictRecord.from_verdict(v, group.name, wall, started) for v in result.verdicts]
    return result, records


def _run_table1(config: ExperimentConfig) -> int:
    rows = table1_slice()
    all_records = []
    table = Table(title="Desk-scale property grid")
    for column in ("group", "command", "params", "outcome", "expected", "match"):
        table.add_column(column)
    matched = True
    for row in rows:
        params = dict(row["params"])
        if "Y" in params:
            params["subgroup"] = params.pop("Y")
        sub = ExperimentConfig(command=row["command"], group=row["group"],
                               workers=config.workers, memory_budget=config.memory_budget, **params)
        try:
            _, records = _execute(sub, preset(row["group"]))
            outcome = ("counterexample" if any(r.outcome == "counterexample" for r in records)
                       else "holds-up-to-bound")
        except BudgetExceeded as e:
            logger.warning(f"{row['group']} {row['command']}: {e}")
            records, outcome = [], "error"
        all_records.extend(records)
        expected = row["expected"]
        ok = expected is None or expected == outcome
        matched = matched and ok
        table.add_row(row["group"], row["command"], " ".join(f"{k}={v}" for k, v in params.items()),
                      outcome, expected or "?", "yes" if ok else "[red]no[/red]")
    console.print(table)
    if config.csv:
        write_csv(all_records, config.csv)
    return 0 if matched else 2


def _run_presets(config: ExperimentConfig) -> int:
    table = Table(title="Presets")
    for column in ("name", "backend", "letters", "relators", "notes"):
        table.add_column(column)
    for name in PRESET_NAMES:
        p = preset(name)
        table.add_row(name, p.structure.backend_hint.value, str(len(p.alphabet)),
                      str(len(p.structure.relators)), PRESET_NOTES.get(name, ""))
    console.print(table)
    library = PresentationLibrary()
    extra = [e for e in library.list_groups_detailed() if e["name"] not in PRESET_NAMES]
    for entry in extra:
        console.print(f"library: {entry['name']} ({entry['backend']}, {entry['path']})")
    return 0


def run(config: ExperimentConfig) -> int:
    """Run one configured command; returns the process exit code."""
    try:
        if config.command == "table1":
            return _run_table1(config)
        if config.command == "presets":
            return _run_presets(config)
        if config.command == "export-presets":
            paths = export_presets(config.output or GROUPS_DIR)
            console.print(f"Exported {len(paths)} presets")
            return 0

        group = resolve_group(config.group, PresentationLibrary())
        result, records = _execute(config, group)
    except BudgetExceeded as e:
        logger.error(f"Budget exceeded: {e} (largest complete radius: {e.largest_radius})")
        return 1
    except (WorkbenchError, ValueError, OSError) as e:
        logger.error(f"{config.command} failed: {e}")
        return 1

    if result.verdicts:
        _print_verdicts(group.name, result.verdicts)
    if result.payload:
        _print_payload(result.payload)

    if config.output and config.command != "ball":
        if records:
            for record in records:
                write_json(record, _record_path(config.output, record, len(records) > 1))
        else:
            write_payload(result.payload, config.output)
    if config.csv and records:
        write_csv(records, config.csv)

    if any(v.outcome == Outcome.COUNTEREXAMPLE for v in result.verdicts):
        return 2
    return 0


# =============================================================================
# CLI ENTRY POINT
# =============================================================================

_PARAM_FLAGS = {
    "k": dict(type=int, help="Fellow traveler constant"),
    "N": dict(type=int, help="Ball radius for almost convexity"),
    "C": dict(type=int, help="Connector length bound"),
    "L": dict(type=int, help="Maximum word or loop length"),
    "n": dict(type=int, help="Witness family index"),
    "R": dict(type=int, help="Subgroup element radius"),
    "word": dict(help="Input word"),
    "u": dict(help="Second word (the shorter fellow traveler)"),
    "family": dict(help="Restrict loops to a witness family, e.g. gersten-loop"),
    "subgroup": dict(help="Space-separated subgroup generators, e.g. 'a'"),
    "mode": dict(choices=[m.value for m in FftpMode], help="FFTP word space"),
    "limit": dict(type=int, help="Maximum number of geodesics to list"),
    "sample": dict(type=int, help="Fill only this many loops, drawn with --seed"),
}

_COMMAND_PARAMS = {
    "ball": ("include-elements",),
    "geodesics": ("word", "limit"),
    "check-fftp": ("k", "L", "mode"),
    "check-lsp": ("k", "L", "family", "basepoint"),
    "check-blsp": ("k", "L", "family"),
    "check-ac": ("N", "C", "sphere-only"),
    "fill": ("word", "k", "L", "sample"),
    "synchronize": ("word", "u", "k"),
    "witness": ("n", "k", "N", "C", "basepoint"),
    "hnn-verify": ("R", "subgroup"),
    "crosscheck": ("L",),
    "table1": (),
    "presets": (),
    "export-presets": (),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="wise", help="Preset name, library name or .pres path")
    common.add_argument("--radius", type=int, help="Ball radius (ball) or distance-oracle radius")
    common.add_argument("--output", type=Path, help="JSON output path")
    common.add_argument("--csv", type=Path, help="CSV summary path")
    common.add_argument("--workers", type=int, default=WORKERS, help=f"Worker threads (default: {WORKERS})")
    common.add_argument("--memory-budget", default=None, help="Ball entry cap, e.g. 50M")
    common.add_argument("--seed", type=int, default=SEED, help=f"Seed for fill --sample (default: {SEED})")
    common.add_argument("--log-level", default=LOG_LEVEL, help=f"Log level (default: {LOG_LEVEL})")

    parser = argparse.ArgumentParser(
        description="Finite-scale loop shortening workbench",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py ball --group wise --radius 3
  python cli.py check-lsp --group gersten --k 1 --max-loop-len 24 --family gersten-loop
  python cli.py check-ac --group stallings --N 5 --C 2
  python cli.py table1 --csv table1.csv
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command, parents=[common])
        for name in _COMMAND_PARAMS[command]:
            if name in ("basepoint", "sphere-only", "include-elements"):
                p.add_argument(f"--{name}", action="store_true")
            elif name == "L":
                p.add_argument("--L", "--max-loop-len", dest="L", **_PARAM_FLAGS["L"])
            else:
                p.add_argument(f"--{name}", dest=name, **_PARAM_FLAGS[name])
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {key: value for key, value in vars(args).items()
              if value is not None and key != "log_level"}
    return ExperimentConfig(**values)


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point for the command line runner."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO), format=LOG_FORMAT)
    try:
        config = config_from_args(args)
    except ValueError as e:
        logger.error(f"Invalid configuration: {e}")
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
