"""Command-line front end: ``cohdist {measure,verify,paper,sweep}``.

Exit codes: 0 success, 2 usage or input error, 3 validation error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .basis_search import SearchConfig
from .channels import DistributionScenario, run_distribution
from .ensembles import KINDS, named_state
from .errors import BadInputFile, BadParameter, CohDistError, DimensionMismatch, ValidationError
from .fileio import _load, _parse_matrix, read_channel, read_state, write_state
from .measures import (
    coherence,
    discord,
    dissonance,
    entropic_cost,
    one_way_discord,
    one_way_dissonance,
    qi_coherence,
    symmetric_discord,
    zurek_discord,
)
from .qstate import ProductBasis, computational_basis, mutual_information, total_correlation
from .verifier import (
    default_spec,
    reproduce_paper,
    theorem_entry,
    verify_ensemble,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_FAILED = 0, 2, 3, 4

MEASURES = ("C", "Q", "D", "L", "C_qi", "Q_oneway", "D_oneway", "theta", "theta_sym", "mutual_info", "total_corr")

ENSEMBLE_ALIASES = {"induced": "induced_mixed", "haar": "haar_pure", "product": "product_pure"}


class UsageError(CohDistError):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _add_shared(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("input")
    src.add_argument("--file", help="state JSON file")
    src.add_argument("--state", help="named state: plus_plus, bell, datta, werner, ghz, w, maximally_mixed")
    src.add_argument("--p", type=float, help="Werner mixing parameter")
    src.add_argument("--n", type=int, help="number of qubits for ghz and w")
    src.add_argument("--dims", type=_int_list, help="subsystem dimensions, e.g. 2,2")
    src.add_argument("--basis", default="computational",
                     help='reference basis: "computational" or a JSON file with "locals"')
    src.add_argument("--measured", type=_int_list, default=(0,), help="measured subsystems (default 0)")
    opt = p.add_argument_group("basis search")
    opt.add_argument("--starts", type=int, default=SearchConfig.random_starts, help="Haar-random starts")
    opt.add_argument("--max-iter", type=int, default=SearchConfig.max_iterations, help="line searches per start")
    opt.add_argument("--tol", type=float, default=SearchConfig.tol, help="convergence tolerance")
    opt.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    p.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes")
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohdist", description="Coherence and discord of multipartite states")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="evaluate measures on one state")
    _add_shared(m)
    m.add_argument("--measure", default="C", help=f"comma-separated subset of {','.join(MEASURES)}")
    m.add_argument("--save-state", help="also write the input state as JSON")

    v = sub.add_parser("verify", help="check a theorem on a state or a random ensemble")
    _add_shared(v)
    v.add_argument("--theorem", required=True, help="1, oneway, bounds, 2, 3, 4, 5 or 6")
    v.add_argument("--ensemble", help=f"ensemble kind: induced, haar, product, classical or {', '.join(KINDS)}")
    v.add_argument("--count", type=int, default=100, help="ensemble size")
    v.add_argument("--channel", help="Kraus channel JSON on R (theorem 6, single state)")

    pp = sub.add_parser("paper", help="recompute the worked-example values")
    _add_shared(pp)
    pp.add_argument("--rows", help="comma-separated row groups or names, e.g. datta or datta.theta")
    pp.add_argument("--tolerance", type=float, help="override every row tolerance")
    pp.add_argument("--json", action="store_true", help="print JSON instead of the table")

    s = sub.add_parser("sweep", help="Werner-family sweep as CSV")
    _add_shared(s)
    s.add_argument("--start", type=float, default=0.0)
    s.add_argument("--stop", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=11)
    return parser


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(random_starts=args.starts, max_iterations=args.max_iter, tol=args.tol, seed=args.seed)
    except ValueError as exc:
        raise UsageError(f"UsageError: {exc}") from None


def _load_input(args):
    """Returns (state, descriptor) from --file or --state, or (None, None) when neither is given."""
    if args.file and args.state:
        raise UsageError("UsageError: --file and --state are mutually exclusive")
    if args.file:
        return read_state(args.file), {"file": args.file}
    if args.state:
        params = {}
        if args.p is not None:
            params["p"] = args.p
        if args.n is not None:
            params["n"] = args.n
        if args.dims is not None and args.state == "maximally_mixed":
            params["dims"] = args.dims
        return named_state(args.state, **params), {"name": args.state, **params}
    return None, None


def _reference(args, dims) -> ProductBasis:
    if args.basis == "computational":
        return computational_basis(dims)
    data = _load(args.basis)
    if "locals" not in data:
        raise BadInputFile(f"BadInputFile: {args.basis} needs key 'locals'")
    locs = tuple(_parse_matrix(u, f"{args.basis} locals[{i}]") for i, u in enumerate(data["locals"]))
    basis = ProductBasis(tuple(dims), locs)
    if basis.unitarity_error() > 1e-10:
        raise DimensionMismatch(f"DimensionMismatch: {args.basis} local bases are not unitary")
    return basis


def _pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------

def cmd_measure(args) -> int:
    rho, desc = _load_input(args)
    if rho is None:
        raise UsageError("UsageError: measure needs --file or --state")
    names = [n.strip() for n in args.measure.split(",") if n.strip()]
    bad = [n for n in names if n not in MEASURES]
    if not names or bad:
        raise UsageError(f"UsageError: unknown measure(s) {bad}; choose from {', '.join(MEASURES)}")
    if args.save_state:
        write_state(rho, args.save_state)
    cfg = _config(args)
    k = _reference(args, rho.dims)
    measured = args.measured
    rest = tuple(i for i in range(rho.n_parties) if i not in measured)
    cache = {}

    def q_full():
        if "Q" not in cache:
            cache["Q"] = discord(rho, cfg, warm_starts=(k,))
        return cache["Q"]

    def q_one():
        if "Q1" not in cache:
            cache["Q1"] = one_way_discord(rho, measured, cfg, warm_starts=(k,))
        return cache["Q1"]

    compute = {
        "C": lambda: coherence(rho, k),
        "Q": q_full,
        "D": lambda: dissonance(rho, k, q=q_full()),
        "L": lambda: entropic_cost(rho, k, q=q_full()),
        "C_qi": lambda: qi_coherence(rho, measured, k),
        "Q_oneway": q_one,
        "D_oneway": lambda: one_way_dissonance(rho, measured, k, q=q_one()),
        "theta": lambda: zurek_discord(rho, measured, cfg, warm_starts=(k,)),
        "theta_sym": lambda: symmetric_discord(rho, cfg, warm_starts=(k,)),
        "mutual_info": lambda: mutual_information(rho, (measured, rest)),
        "total_corr": lambda: total_correlation(rho),
    }
    out = {}
    for name in names:
        r = compute[name]()
        if isinstance(r, float):
            out[name] = {"value": r}
            continue
        entry = {"value": float(r.value)}
        if r.search is not None:
            entry["witness"] = [_pairs(u) for u in r.witness.locals]
        out[name] = entry
    _emit(json.dumps({"state": {**desc, "dims": list(rho.dims)}, "measures": out}) + "\n", args.out)
    return EXIT_OK


def _ensemble_kind(name: str) -> str:
    return ENSEMBLE_ALIASES.get(name, name)


def _write_ensemble(report, out: str | None) -> None:
    if out is None:
        sys.stdout.write(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
        return
    base = out[:-5] if out.endswith(".json") else out
    with open(base + ".json", "w") as fh:
        fh.write(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    with open(base + ".jsonl", "w") as fh:
        fh.write(report.jsonl())
    with open(base + ".csv", "w") as fh:
        fh.write(report.csv())


def cmd_verify(args) -> int:
    theorem_entry(args.theorem)
    rho, desc = _load_input(args)
    cfg = _config(args)
    if rho is not None:
        if args.ensemble:
            raise UsageError("UsageError: --ensemble excludes --file and --state")
        report = _verify_single(args, rho, cfg)
        report.state = desc
        _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
        if report.status == "finding":
            print(f"warning: theorem {args.theorem}: finding, slack {report.slack:.3e}", file=sys.stderr)
        if report.status == "fail":
            print(f"theorem {args.theorem} failed: slack {report.slack:.3e}", file=sys.stderr)
            return EXIT_FAILED
        return EXIT_OK

    kind = _ensemble_kind(args.ensemble) if args.ensemble else None
    if args.count < 1 or args.jobs < 1:
        raise UsageError("UsageError: --count and --jobs must be positive")
    spec = default_spec(args.theorem, args.count, args.seed, kind, args.dims)
    report = verify_ensemble(args.theorem, spec, cfg, jobs=args.jobs)
    _write_ensemble(report, args.out)
    for key in report.findings:
        print(f"warning: theorem {args.theorem}: finding at replay key seed={key[0]} index={key[1]}", file=sys.stderr)
    hard = report.hard_failures
    if hard:
        keys = " ".join(f"{s}:{i}" for s, i in hard)
        print(f"theorem {args.theorem}: {len(hard)} failure(s); replay keys (seed:index): {keys}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _verify_single(args, rho, cfg):
    from . import verifier as v

    t = str(args.theorem)
    if t == "6":
        if not args.channel:
            raise UsageError("UsageError: theorem 6 on a single state needs --channel")
        return run_distribution(DistributionScenario(rho, channel=read_channel(args.channel)))
    if t == "5":
        return run_distribution(DistributionScenario(rho))
    k = _reference(args, rho.dims)
    checks = {
        "1": lambda: v.check_theorem1(rho, k, cfg),
        "oneway": lambda: v.check_oneway_chain(rho, args.measured, k, cfg),
        "bounds": lambda: v.check_discord_bounds(rho, k, cfg, measured=args.measured),
        "2": lambda: v.check_theorem2_3(rho, k, cfg),
        "3": lambda: v.check_theorem2_3(rho, k, cfg),
        "4": lambda: v.check_theorem4(rho, k, cfg),
    }
    return checks[t]()


def cmd_paper(args) -> int:
    rows = [r.strip() for r in args.rows.split(",")] if args.rows else None
    table = reproduce_paper(_config(args), rows=rows, tolerance=args.tolerance)
    if not table:
        raise UsageError(f"UsageError: no rows match {args.rows!r}")
    payload = json.dumps([r.to_dict() for r in table], indent=2) + "\n"
    if args.json:
        sys.stdout.write(payload)
    else:
        width = max(len(r.name) for r in table)
        print(f"{'row':<{width}}  {'expected':>10}  {'computed':>14}  {'delta':>10}  {'tol':>8}  status")
        for r in table:
            print(f"{r.name:<{width}}  {r.expected:>10.6g}  {r.computed:>14.10f}  {r.delta:>10.3e}  "
                  f"{r.tolerance:>8.1e}  {r.status}")
    if args.out:
        _emit(payload, args.out)
    for r in table:
        if r.status == "finding":
            print(f"warning: {r.name}: finding, delta {r.delta:.3e}", file=sys.stderr)
    failing = [r.name for r in table if r.status == "fail"]
    if failing:
        print(f"failing rows: {', '.join(failing)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


SWEEP_COLUMNS = ("p", "C", "theta", "theta_sym", "equality_gap")


def werner_sweep(start: float, stop: float, steps: int, config: SearchConfig | None = None) -> list[dict]:
    if steps < 2 or not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0) or start > stop:
        raise BadParameter(f"BadParameter: sweep range [{start}, {stop}] with {steps} steps; need 0 <= start <= stop <= 1, steps >= 2")
    rows = []
    for p in np.linspace(start, stop, steps):
        rho = named_state("werner", p=float(p))
        c = coherence(rho).value
        t = zurek_discord(rho, (0,), config).value
        ts = symmetric_discord(rho, config).value
        rows.append({"p": float(p), "C": c, "theta": t, "theta_sym": ts, "equality_gap": abs(t - c)})
    return rows


def cmd_sweep(args) -> int:
    if args.file or (args.state and args.state != "werner"):
        raise UsageError("UsageError: sweep runs over the Werner family only")
    rows = werner_sweep(args.start, args.stop, args.steps, _config(args))
    _emit(_csv_text(rows), args.out)
    return EXIT_OK


def _csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(v)) for k, v in r.items()})
    return buf.getvalue()


COMMANDS = {"measure": cmd_measure, "verify": cmd_verify, "paper": cmd_paper, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CohDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
