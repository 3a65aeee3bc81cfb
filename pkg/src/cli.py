"""
Kommandozeile des Kontextualitäts-Toolkits

    python src/cli.py generate --family lines --qubits 3
    python src/cli.py degree --family doily --qubits 2
    python src/cli.py degree --incidence doily.inc
    python src/cli.py check perpsets --max-qubits 5
    python src/cli.py export --family grid --qubits 2 --format bc --low 5

Ausgaben auf stdout sind key=value-Zeilen, Logs gehen auf stderr.
Exit-Codes: 0 Erfolg, 1 Prüfung fehlgeschlagen, 2 ungültige Eingabe, 3 I/O-Fehler.
"""

import argparse
import logging
import shlex
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import run_log
from checks import run_checks
from config import Config
from formats import (
    dump_configuration,
    dump_incidence,
    format_degree_result,
    parse_incidence,
    read_configuration,
    write_configuration,
)
from geometry import Configuration, Family, FamilySpec, build_family, subspace_census
from incidence import IncidenceSystem, build_incidence, validate
from logging_setup import setup_logging
from run_log import RunManifest
from satbridge import ExternalSatOracle, XorThresholdProblem, to_bc_text, to_dimacs
from solver import METHOD_ALIASES, SolveBudget, SolveMethod, degree, degree_ladder

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

FAMILY_ALIASES = ["lines", "generators"]


class UsageError(ValueError):
    """Ungültige Kombination von Argumenten."""


def _family_spec(args) -> FamilySpec:
    family, k = args.family, args.k
    if family == "lines":
        family, k = Family.SUBSPACES.value, 1
    elif family == "generators":
        family, k = Family.SUBSPACES.value, args.qubits - 1
    embedding = None
    if args.embedding:
        try:
            embedding = tuple(int(v) for v in args.embedding.split(","))
        except ValueError:
            raise UsageError(f"--embedding erwartet kommagetrennte Zahlen, nicht {args.embedding!r}") from None
    return FamilySpec(family=family, qubits=args.qubits, k=k, anchor=args.anchor, embedding=embedding)


def _load_configurations(args, threads: int) -> list[Configuration]:
    if getattr(args, "input", None):
        config = read_configuration(args.input)
        violations = validate(config)
        if violations:
            for v in violations:
                logger.error(str(v))
            raise UsageError(f"{args.input}: {len(violations)} Verstöße")
        return [config]
    if not args.family or not args.qubits:
        raise UsageError("Entweder --input, --incidence oder --family und --qubits angeben")
    return build_family(_family_spec(args), threads=threads)


def _load_systems(args, threads: int) -> list[tuple[Optional[Configuration], IncidenceSystem]]:
    """Konfigurationen mit ihrem System, bei --incidence nur das System."""
    if getattr(args, "incidence", None):
        if getattr(args, "input", None) or args.family:
            raise UsageError("--incidence schließt --input und --family aus")
        system = parse_incidence(Path(args.incidence).read_text(encoding="utf-8"))
        logger.info(f"{args.incidence}: l={system.n_rows}, p={system.n_cols}")
        return [(None, system)]
    return [(c, build_incidence(c)) for c in _load_configurations(args, threads)]


def _distinct(values) -> str:
    return ",".join(str(v) for v in sorted(set(values)))


def _budget(args, cfg: Config, method: SolveMethod) -> SolveBudget:
    return SolveBudget(
        method=method,
        time_limit=args.time_limit if args.time_limit is not None else cfg.time_limit,
        iterations=args.iters if args.iters is not None else cfg.iterations,
        seed=args.seed if args.seed is not None else cfg.seed,
        threads=args.threads or cfg.threads,
    )


# === KOMMANDOS ===


def cmd_generate(args, cfg: Config) -> tuple[int, dict]:
    threads = args.threads or cfg.threads
    spec = _family_spec(args)
    print(f"family={spec.family.value}")
    print(f"qubits={spec.qubits}")
    if spec.k is not None:
        print(f"k={spec.k}")

    if args.count_only and spec.family == Family.SUBSPACES:
        census = subspace_census(spec.qubits, spec.k, threads=threads)
        summary = {"configurations": 1, "contexts": census.count, "observables": 4 ** spec.qubits - 1, "negative": census.negative}
    else:
        configs = build_family(spec, threads=threads)
        summary = {
            "configurations": len(configs),
            "contexts": _distinct(len(c.contexts) for c in configs),
            "observables": _distinct(len(c.points) for c in configs),
            "negative": _distinct(c.n_negative for c in configs),
        }
        if args.output and not args.count_only:
            _write_configurations(configs, Path(args.output))
    for key, value in summary.items():
        print(f"{key}={value}")
    return EXIT_OK, summary


def _write_configurations(configs: list[Configuration], output: Path):
    if len(configs) == 1 and output.suffix:
        write_configuration(configs[0], output)
        print(f"output={output}")
        return
    output.mkdir(parents=True, exist_ok=True)
    width = len(str(len(configs)))
    for i, c in enumerate(configs):
        write_configuration(c, output / f"{c.family}_{i:0{width}d}.txt")
    print(f"output={output}")


def _oracle_for(system, args, cfg: Config, budget: SolveBudget) -> Optional[ExternalSatOracle]:
    command = shlex.split(args.solver_cmd) if args.solver_cmd else cfg.sat_solver_cmd
    if not command:
        return None
    return ExternalSatOracle(system, command, timeout=budget.time_limit)


def cmd_degree(args, cfg: Config) -> tuple[int, dict]:
    threads = args.threads or cfg.threads
    loaded = _load_systems(args, threads)
    method = None if args.method == "auto" else SolveMethod(args.method)
    budget = _budget(args, cfg, method or SolveMethod.EXACT)
    results = []
    for idx, (c, system) in enumerate(loaded):
        oracle = _oracle_for(system, args, cfg, budget)
        if method is None:
            result = degree_ladder(system, budget, cfg.bb_max_observables, oracle=oracle)
        else:
            result = degree(system, budget, oracle=oracle)
        label = c.label if c is not None else ""
        if len(loaded) > 1:
            print(f"configuration={idx}")
            if label:
                print(f"label={label}")
        print(format_degree_result(result, system.n_rows), end="")
        results.append({"label": label, "status": result.status.value, "d": result.d})

        if args.unsat_out:
            target = Path(args.unsat_out)
            if len(loaded) > 1:
                target = target.with_name(f"{target.stem}_{idx}{target.suffix}")
            _write_unsatisfied(c, system, result.unsatisfied, target)
            print(f"unsat_out={target}")
    return EXIT_OK, {"results": results}


def _write_unsatisfied(c: Optional[Configuration], system: IncidenceSystem, unsatisfied, target: Path):
    """Unerfüllte Kontexte als Konfiguration, ohne Konfiguration als Teilsystem (A, E)."""
    if c is None:
        rows = tuple(system.rows[i] for i in unsatisfied)
        valuation = sum(1 << k for k, i in enumerate(unsatisfied) if system.valuation >> i & 1)
        target.write_text(dump_incidence(IncidenceSystem(len(rows), system.n_cols, rows, valuation)), encoding="utf-8")
        return
    unsat = Configuration(
        qubits=c.qubits,
        family=f"{c.family}-unsatisfied",
        points=c.points,
        contexts=tuple(c.contexts[i] for i in unsatisfied),
        label=c.label,
    )
    write_configuration(unsat, target)


def cmd_check(args, cfg: Config) -> tuple[int, dict]:
    budget = _budget(args, cfg, SolveMethod.EXACT)
    reports = run_checks(
        args.selector,
        max_qubits=args.max_qubits,
        qubits=args.qubits or 5,
        k=args.k if args.k is not None else 3,
        threads=args.threads or cfg.threads,
        budget=budget,
    )
    for report in reports:
        for line in report.lines:
            print(f"# {report.name}: {line}")
        print(f"{report.name}={'pass' if report.passed else 'fail'}")
    passed = all(r.passed for r in reports)
    return (EXIT_OK if passed else EXIT_FAILED), {r.name: r.passed for r in reports}


def cmd_export(args, cfg: Config) -> tuple[int, dict]:
    loaded = _load_systems(args, args.threads or cfg.threads)
    if len(loaded) != 1:
        raise UsageError(f"export braucht genau eine Konfiguration, die Familie liefert {len(loaded)}")
    [(c, system)] = loaded
    mapping = None
    if args.format == "config":
        if c is None:
            raise UsageError("--format config braucht eine Konfiguration, keine Inzidenzdatei")
        text = dump_configuration(c)
    elif args.format == "incidence":
        text = dump_incidence(system)
    else:
        low = args.low if args.low is not None else system.n_positive
        high = args.high if args.high is not None else system.n_rows
        prob = XorThresholdProblem(system, low, high)
        if args.format == "bc":
            text = to_bc_text(prob)
        else:
            encoding = to_dimacs(prob)
            text = encoding.text
            mapping = encoding.dump_variable_map()

    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"output={args.output}")
        if mapping is not None:
            map_path = f"{args.output}.map"
            Path(map_path).write_text(mapping, encoding="utf-8")
            print(f"map={map_path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK, {"format": args.format, "contexts": system.n_rows, "observables": system.n_cols}


COMMANDS = {
    "generate": cmd_generate,
    "degree": cmd_degree,
    "check": cmd_check,
    "export": cmd_export,
}


# === ARGUMENTE ===


def _add_family_args(parser: argparse.ArgumentParser, required: bool):
    families = [f.value for f in Family] + FAMILY_ALIASES
    parser.add_argument("--family", choices=families, required=required, help="Konfigurationsfamilie")
    parser.add_argument("--qubits", type=int, required=required, help="Anzahl der Qubits N")
    parser.add_argument("--k", type=int, help="Projektive Dimension (nur subspaces)")
    parser.add_argument("--anchor", help="Perpset-Zentrum oder Quadrikindex als Observable")
    parser.add_argument("--embedding", help="Identitäts-Positionen für doily/two-spread/grid, z.B. 3,4")


def _add_budget_args(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, help="Zufallsseed (Standard CONTEXT_SEED)")
    parser.add_argument("--time-limit", type=float, help="Zeitlimit in Sekunden")
    parser.add_argument("--iters", type=int, help="Iterationen der Heuristik")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Kontextualität von Konfigurationen in symplektischen Polarräumen W(2N-1,2)",
    )
    parser.add_argument("--threads", type=int, help="Anzahl der Worker-Prozesse")
    parser.add_argument("--manifest", help="Manifest des Laufs als JSON schreiben")
    parser.add_argument("--log-file", help="Logs zusätzlich in diese Datei schreiben")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug-Logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Konfigurationen erzeugen und zählen")
    _add_family_args(gen, required=True)
    gen.add_argument("--count-only", action="store_true", help="Nur zählen, nichts schreiben")
    gen.add_argument("--output", help="Zieldatei (eine Konfiguration) oder Verzeichnis")

    deg = sub.add_parser("degree", help="Kontextualitätsgrad berechnen")
    deg.add_argument("--input", help="Konfigurationsdatei")
    deg.add_argument("--incidence", help="Inzidenzdatei (A, E) statt einer Konfiguration")
    _add_family_args(deg, required=False)
    deg.add_argument(
        "--method",
        choices=["auto"] + [m.value for m in SolveMethod] + list(METHOD_ALIASES),
        default="auto",
        help="Verfahren (auto: Gauß, exakt, Heuristik, externer Solver)",
    )
    _add_budget_args(deg)
    deg.add_argument("--solver-cmd", help="Externer SAT-Solver (Standard CONTEXT_SAT_SOLVER)")
    deg.add_argument("--unsat-out", help="Unerfüllte Kontexte als Konfigurationsdatei schreiben")

    chk = sub.add_parser("check", help="Eigenschaften prüfen")
    chk.add_argument(
        "selector",
        choices=["all", "perpsets", "positivity", "census", "doily", "spreads", "two-spreads", "grids", "quadrics"],
    )
    chk.add_argument("--max-qubits", type=int, default=3, help="Größtes N der Prüfungen")
    chk.add_argument("--qubits", type=int, help="N für positivity")
    chk.add_argument("--k", type=int, help="k für positivity")
    _add_budget_args(chk)

    exp = sub.add_parser("export", help="Inzidenz-, bc2cnf- oder DIMACS-Text schreiben")
    exp.add_argument("--input", help="Konfigurationsdatei")
    exp.add_argument("--incidence", help="Inzidenzdatei (A, E) statt einer Konfiguration")
    _add_family_args(exp, required=False)
    exp.add_argument("--format", choices=["config", "incidence", "bc", "dimacs"], default="incidence")
    exp.add_argument("--low", type=int, help="Mindestzahl erfüllter Kontexte (Standard |C+|)")
    exp.add_argument("--high", type=int, help="Höchstzahl erfüllter Kontexte (Standard l)")
    exp.add_argument("--output", help="Zieldatei (Standard stdout)")
    return parser


def _parameters(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("verbose", "log_file", "manifest") and v is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        cfg = Config()
    except ValueError as e:
        print(f"Konfigurationsfehler: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging("DEBUG" if args.verbose else cfg.log_level, args.log_file)
    if args.threads is not None and args.threads < 1:
        logger.error("--threads muss mindestens 1 sein")
        return EXIT_USAGE

    manifest = RunManifest(
        command=args.command,
        parameters=_parameters(args),
        seed=getattr(args, "seed", None) if getattr(args, "seed", None) is not None else cfg.seed,
    )
    start = time.time()
    try:
        code, summary = COMMANDS[args.command](args, cfg)
    except OSError as e:
        logger.error(f"I/O-Fehler: {e}")
        code, summary = EXIT_IO, {"error": str(e)}
    except ValueError as e:
        logger.error(f"Ungültige Eingabe: {e}")
        code, summary = EXIT_USAGE, {"error": str(e)}

    manifest.duration = round(time.time() - start, 3)
    manifest.result = summary
    manifest.success = code == EXIT_OK
    if args.command in ("degree", "check"):
        try:
            manifest.budget = _budget(args, cfg, SolveMethod.EXACT).model_dump(mode="json")
            manifest.budget["method"] = getattr(args, "method", SolveMethod.EXACT.value)
        except ValueError:
            pass
    if cfg.run_log_path:
        run_log.configure(cfg.run_log_path)
        run_log.log_run(manifest)
    if args.manifest:
        try:
            manifest.write(args.manifest)
            print(f"manifest={args.manifest}")
        except OSError as e:
            logger.error(f"Manifest nicht schreibbar: {e}")
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
