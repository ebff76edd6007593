"""Scenario files, the end-to-end pipeline, and CSV / report emission.

A scenario is a TOML file with a top-level pattern plus [plant], [gains]
and [sim] sections (grammar documented in the README). Running one goes
validate -> Riccati solve -> gain certification or synthesis -> simulate
-> cost report, then writes the requested outputs. All numbers are
printed with 12 significant digits so outputs are reproducible
byte-for-byte on a given platform.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .cost import CostReport, GapWeights, gap_weights, optimality_certificate
from .errors import (AssumptionError, CertificationError, ConvergenceError,
                     DimensionError, ScenarioError, StabilityError)
from .gain_synthesis import DEFAULT_MARGIN, SynthesisResult, certify_gains, synthesize
from .linalg import spectral_radius
from .model import InformationPattern, PlantModel, validate
from .observers import ObserverScheme, build_scheme
from .riccati import closed_loop_matrix, solve_dare
from .sim import SimTrace, simulate

OUTPUT_KINDS = ("trace_csv", "report_text", "matrices_dump")

DEFAULT_HORIZON = 500
DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class GivenGains:
    L: tuple


@dataclass(frozen=True)
class SynthesizeGains:
    seed: int
    margin: float = DEFAULT_MARGIN


@dataclass(frozen=True)
class Scenario:
    name: str
    plant: PlantModel
    pattern: InformationPattern
    gains: "GivenGains | SynthesizeGains | None"  # None only for state feedback
    xhat0: Optional[tuple]
    horizon: int
    epsilon: float
    outputs: frozenset


@dataclass(frozen=True)
class RunReport:
    """Everything the pipeline computed; numbers come straight from the
    library calls, the CLI adds no arithmetic."""

    scenario: Scenario
    P: np.ndarray
    K: np.ndarray
    rho_closed_loop: float
    synthesis: Optional[SynthesisResult]
    scheme: Optional[ObserverScheme]
    weights: Optional[GapWeights]
    cost: Optional[CostReport]
    trace: SimTrace
    files: tuple


def _require(table, key, where, kind=None):
    if key not in table:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{where}: key {key!r} has the wrong type")
    return value


def _agent_matrices(raw, where):
    if not isinstance(raw, list) or not raw:
        raise ScenarioError(f"{where}: expected a nonempty list of per-agent matrices")
    try:
        return [np.asarray(entry, dtype=float) for entry in raw]
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Parse and cross-check a scenario file. Raises ScenarioError with the
    offending file / section / key on any problem."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: TOML parse error: {exc}") from exc

    try:
        pattern = InformationPattern.from_string(
            str(_require(data, "pattern", f"{path}")))
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{path}: {exc}") from exc

    plant_tbl = _require(data, "plant", f"{path}", dict)
    where = f"{path} [plant]"
    try:
        plant = PlantModel(
            A=np.asarray(_require(plant_tbl, "A", where), dtype=float),
            B=_agent_matrices(_require(plant_tbl, "B", where), where + " B"),
            H=_agent_matrices(_require(plant_tbl, "H", where), where + " H"),
            Q=np.asarray(_require(plant_tbl, "Q", where), dtype=float),
            R=_agent_matrices(_require(plant_tbl, "R", where), where + " R"),
            x0=np.asarray(_require(plant_tbl, "x0", where), dtype=float),
        )
    except (DimensionError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{where}: {exc}") from exc

    gains_tbl = data.get("gains")
    if pattern.is_decentralized:
        if gains_tbl is None:
            gains = SynthesizeGains(seed=0)
        else:
            where = f"{path} [gains]"
            mode = str(_require(gains_tbl, "mode", where))
            if mode == "given":
                gains = GivenGains(L=tuple(_agent_matrices(
                    _require(gains_tbl, "L", where), where + " L")))
            elif mode == "synthesize":
                try:
                    gains = SynthesizeGains(
                        seed=int(gains_tbl.get("seed", 0)),
                        margin=float(gains_tbl.get("margin", DEFAULT_MARGIN)))
                except (TypeError, ValueError) as exc:
                    raise ScenarioError(f"{where}: {exc}") from exc
            else:
                raise ScenarioError(f"{where}: mode must be 'given' or 'synthesize', got {mode!r}")
    else:
        if gains_tbl is not None and str(gains_tbl.get("mode", "")) == "given":
            raise ScenarioError(
                f"{path}: gains mode 'given' requires a decentralized pattern, "
                f"not {pattern.value!r}")
        gains = None

    sim_tbl = data.get("sim", {})
    where = f"{path} [sim]"
    try:
        horizon = int(sim_tbl.get("horizon", DEFAULT_HORIZON))
        epsilon = float(sim_tbl.get("epsilon", DEFAULT_EPSILON))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    if horizon < 1:
        raise ScenarioError(f"{where}: horizon must be at least 1, got {horizon}")
    if epsilon <= 0:
        raise ScenarioError(f"{where}: epsilon must be positive, got {epsilon}")
    xhat0 = None
    if "xhat0" in sim_tbl:
        rows = sim_tbl["xhat0"]
        if not isinstance(rows, list) or len(rows) != plant.r:
            raise ScenarioError(f"{where}: xhat0 must list one vector per agent ({plant.r})")
        try:
            xhat0 = tuple(np.asarray(row, dtype=float).ravel() for row in rows)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{where}: xhat0: {exc}") from exc
        for i, v in enumerate(xhat0):
            if v.shape[0] != plant.n:
                raise ScenarioError(f"{where}: xhat0[{i}] must have length {plant.n}")

    outputs = data.get("outputs", list(OUTPUT_KINDS))
    if not isinstance(outputs, list) or any(o not in OUTPUT_KINDS for o in outputs):
        raise ScenarioError(f"{path}: outputs must be a list drawn from {OUTPUT_KINDS}")

    return Scenario(name=path.stem, plant=plant, pattern=pattern, gains=gains,
                    xhat0=xhat0, horizon=horizon, epsilon=epsilon,
                    outputs=frozenset(outputs))


def _apply_overrides(scenario: Scenario, horizon, epsilon, seed, pattern) -> Scenario:
    new_pattern = scenario.pattern if pattern is None else InformationPattern.from_string(pattern)
    gains = scenario.gains
    if seed is not None:
        # a seed override always means: synthesize with that seed
        margin = gains.margin if isinstance(gains, SynthesizeGains) else DEFAULT_MARGIN
        gains = SynthesizeGains(seed=int(seed), margin=margin)
    if new_pattern.is_decentralized and gains is None:
        gains = SynthesizeGains(seed=0)
    if not new_pattern.is_decentralized:
        gains = None
    return Scenario(name=scenario.name, plant=scenario.plant, pattern=new_pattern,
                    gains=gains, xhat0=scenario.xhat0,
                    horizon=scenario.horizon if horizon is None else int(horizon),
                    epsilon=scenario.epsilon if epsilon is None else float(epsilon),
                    outputs=scenario.outputs)


def run_scenario(path, out_dir=None, horizon=None, epsilon=None,
                 seed=None, pattern=None) -> RunReport:
    """Execute the full pipeline for one scenario file.

    Flag-style keyword overrides win over file values. Raises
    AssumptionError when validation fails, CertificationError when no
    certified stable gains are available, ScenarioError for parse
    problems.
    """
    scenario = _apply_overrides(load_scenario(path), horizon, epsilon, seed, pattern)
    plant = scenario.plant

    diagnostics = validate(plant)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise AssumptionError(errors)

    sol = solve_dare(plant)
    rho_cl = spectral_radius(closed_loop_matrix(plant, sol))

    synthesis = None
    scheme = None
    weights = None
    cost = None
    if scenario.pattern.is_decentralized:
        if isinstance(scenario.gains, GivenGains):
            synthesis = certify_gains(plant, sol, scenario.pattern, scenario.gains.L)
        else:
            synthesis = synthesize(plant, sol, scenario.pattern,
                                   seed=scenario.gains.seed,
                                   margin=scenario.gains.margin)
        if not synthesis.certified:
            raise CertificationError(
                f"observer gains not certified: achieved spectral radius "
                f"{synthesis.achieved_radius:.6g} (method {synthesis.method})",
                result=synthesis)
        scheme = build_scheme(plant, sol, synthesis.L, scenario.pattern)
        weights = gap_weights(plant, sol)

    trace = simulate(plant, sol, scheme, scenario.pattern,
                     x0=plant.x0, xhat0=scenario.xhat0, horizon=scenario.horizon)

    if scenario.pattern.is_decentralized:
        xhat0 = scenario.xhat0 if scenario.xhat0 is not None \
            else tuple(np.zeros(plant.n) for _ in range(plant.r))
        cost = optimality_certificate(plant, sol, scheme, plant.x0, xhat0,
                                      epsilon=scenario.epsilon)
    else:
        j_opt = float(plant.x0 @ sol.P @ plant.x0)
        cost = CostReport(J_opt=j_opt, J_dec=j_opt, gap=0.0)

    out_dir = Path(out_dir) if out_dir is not None else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = {kind: out_dir / f"{scenario.name}_{suffix}"
               for kind, suffix in (("trace_csv", "trace.csv"),
                                    ("report_text", "report.txt"),
                                    ("matrices_dump", "matrices.txt"))
               if kind in scenario.outputs}

    report = RunReport(scenario=scenario, P=sol.P, K=sol.K, rho_closed_loop=rho_cl,
                       synthesis=synthesis, scheme=scheme, weights=weights,
                       cost=cost, trace=trace,
                       files=tuple(str(p) for p in targets.values()))
    if "trace_csv" in targets:
        emit_trace_csv(trace, targets["trace_csv"])
    if "matrices_dump" in targets:
        targets["matrices_dump"].write_text(matrices_dump_text(report), encoding="ascii")
    if "report_text" in targets:
        targets["report_text"].write_text(format_report(report), encoding="ascii")
    return report


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def emit_trace_csv(trace: SimTrace, path) -> None:
    """Write the trace as CSV, one row per step k = 0 .. horizon.

    Columns: k, state, per-agent estimates, per-agent error norms,
    per-agent inputs, stage cost. Inputs and stage costs exist for
    k < horizon; the final row pads them with zeros. Values carry 12
    significant digits.
    """
    n = trace.x.shape[1]
    r = trace.xhat.shape[1]
    header = ["k"]
    header += [f"x{j + 1}" for j in range(n)]
    header += [f"xhat{i + 1}_{j + 1}" for i in range(r) for j in range(n)]
    header += [f"xtilde_norm_{i + 1}" for i in range(r)]
    header += [f"u{i + 1}_{j + 1}" for i, m in enumerate(trace.u_sizes) for j in range(m)]
    header += ["stage_cost"]

    m_total = trace.u.shape[1]
    lines = [",".join(header)]
    for k in range(trace.horizon + 1):
        row = [str(k)]
        row += [_fmt(v) for v in trace.x[k]]
        row += [_fmt(v) for i in range(r) for v in trace.xhat[k, i]]
        row += [_fmt(v) for v in trace.xtilde_norms[k]]
        if k < trace.horizon:
            row += [_fmt(v) for v in trace.u[k]]
            row += [_fmt(trace.stage_cost[k])]
        else:
            row += [_fmt(0.0)] * (m_total + 1)
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _matrix_lines(name: str, M: np.ndarray) -> list:
    M = np.atleast_2d(M)
    lines = [f"{name} ="]
    for row in M:
        lines.append("  " + "  ".join(_fmt(v) for v in row))
    return lines


def format_report(report: RunReport) -> str:
    """Human-readable run summary with 12-significant-digit numbers."""
    sc = report.scenario
    lines = [f"scenario: {sc.name}",
             f"pattern: {sc.pattern.value}",
             "validation: OK"]
    lines += _matrix_lines("P", report.P)
    lines += _matrix_lines("K", report.K)
    lines.append(f"spectral radius of A+BK: {_fmt(report.rho_closed_loop)}")
    if report.synthesis is not None:
        syn = report.synthesis
        for i, L_i in enumerate(syn.L):
            lines += _matrix_lines(f"L[{i + 1}]", L_i)
        lines.append(f"gain method: {syn.method}")
        lines.append(f"spectral radius of error matrix: {_fmt(syn.achieved_radius)}")
        lines.append(f"certified: {'yes' if syn.certified else 'no'}")
        lines.append("spectral radius of augmented matrix: "
                     f"{_fmt(spectral_radius(report.scheme.augmented_matrix))}")
    if report.cost is not None:
        c = report.cost
        lines.append(f"J_opt: {_fmt(c.J_opt)}")
        lines.append(f"J_dec: {_fmt(c.J_dec)}")
        lines.append(f"gap: {_fmt(c.gap)}")
        if c.N_eps is not None:
            lines.append(f"decay rate lambda: {_fmt(c.lam)}")
            lines.append(f"transient constant c: {_fmt(c.c)}")
            lines.append(f"gap bound scale c_bar: {_fmt(c.c_bar)}")
            lines.append(f"epsilon: {_fmt(c.epsilon)}")
            lines.append(f"epsilon horizon N: {c.N_eps}")
            lines.append(f"gap bound at N: {_fmt(c.bound_at_N)}")
            lines.append(f"exact tail gap at N: {_fmt(c.gap_at_N)}")
    if report.files:
        lines.append("files written:")
        lines += [f"  {p}" for p in report.files]
    return "\n".join(lines) + "\n"


def matrices_dump_text(report: RunReport) -> str:
    """All structured matrices of the run, labeled, 12 significant digits."""
    sc = report.scenario
    plant = sc.plant
    lines = []
    lines += _matrix_lines("A", plant.A)
    for i in range(plant.r):
        lines += _matrix_lines(f"B[{i + 1}]", plant.B[i])
    for i in range(plant.r):
        lines += _matrix_lines(f"H[{i + 1}]", plant.H[i])
    lines += _matrix_lines("Q", plant.Q)
    for i in range(plant.r):
        lines += _matrix_lines(f"R[{i + 1}]", plant.R[i])
    lines += _matrix_lines("x0", plant.x0)
    lines += _matrix_lines("P", report.P)
    lines += _matrix_lines("K", report.K)
    if report.scheme is not None:
        for i, L_i in enumerate(report.scheme.L):
            lines += _matrix_lines(f"L[{i + 1}]", L_i)
        lines += _matrix_lines("error_matrix", report.scheme.error_matrix)
        lines += _matrix_lines("coupling_B", report.scheme.coupling_B)
        lines += _matrix_lines("augmented_matrix", report.scheme.augmented_matrix)
    if report.weights is not None:
        lines += _matrix_lines("S1", report.weights.S1)
        lines += _matrix_lines("S2", report.weights.S2)
        lines += _matrix_lines("W", report.weights.W)
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    """CLI entry point. Exit codes: 0 success, 1 validation failure,
    2 certification failure, 3 I/O or parse error."""
    parser = argparse.ArgumentParser(
        prog="declq",
        description="Decentralized LQ control scenarios: validate, solve, "
                    "synthesize observer gains, simulate, and report costs.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a scenario file end to end")
    run_p.add_argument("scenario", help="path to a TOML scenario file")
    run_p.add_argument("--out-dir", default=None, help="directory for output files (default: cwd)")
    run_p.add_argument("--horizon", type=int, default=None, help="override the simulation horizon")
    run_p.add_argument("--epsilon", type=float, default=None, help="override the certificate epsilon")
    run_p.add_argument("--seed", type=int, default=None,
                       help="synthesize gains with this seed (overrides given gains)")
    run_p.add_argument("--pattern", default=None,
                       choices=[p.value for p in InformationPattern],
                       help="override the information pattern")
    args = parser.parse_args(argv)

    try:
        report = run_scenario(args.scenario, out_dir=args.out_dir,
                              horizon=args.horizon, epsilon=args.epsilon,
                              seed=args.seed, pattern=args.pattern)
    except AssumptionError as exc:
        print("validation failed:", file=sys.stderr)
        for diag in exc.diagnostics:
            print(f"  [{diag.check}] {diag.message}", file=sys.stderr)
        return 1
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return 2
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, StabilityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1

    sys.stdout.write(format_report(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
