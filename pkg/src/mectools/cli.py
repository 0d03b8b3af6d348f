"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 computation error, 3 reproduction
diff failure.  ``ET_SEED`` overrides the default seed.  Every command given
``--out`` writes a ``manifest.json`` (command, configuration, seed, versions)
next to its outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, figures
from ._validation import DimensionError, check_seed
from .antichains import enumerate_family, mask_to_set
from .constructions import sn_symmetric_state
from .formulas import conjectured_min_length, conjectured_principal
from .invariants import invariant_vector, principal_invariant
from .markov import NotAbsorbingError, StochasticMatrix, analyze, from_counts
from .registry import derive_seed, enumerate_patterns, is_mes, min_length
from .reproduce import TARGETS, Options, reproduce
from .tensor import State, Support, random_state
from .walks import fraction_grid, forward_walk, run_ensemble

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_DIFF = 0, 1, 2, 3
MAX_FULL_FAMILY_PARTIES = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}") from None


def default_seed() -> int:
    raw = os.environ.get("ET_SEED")
    if raw is None:
        return 0
    try:
        return check_seed(int(raw))
    except (ValueError, TypeError):
        raise UsageError(f"ET_SEED must be a 64-bit unsigned integer, got {raw!r}") from None


def _versions() -> dict:
    import numba
    import sklearn

    return {
        "mectools": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
        "scikit-learn": sklearn.__version__,
    }


def _writer(out: Path | None):
    files = []

    def write(name: str, text: str):
        if out is None:
            return
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        files.append(name)

    return write, files


def _manifest(out: Path | None, args, files, started: float) -> None:
    if out is None:
        return
    config = {k: (list(v) if isinstance(v, tuple) else str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    data = {
        "command": args.command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "versions": _versions(),
        "outputs": sorted(files),
        "elapsed_seconds": round(time.time() - started, 3),
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands -------------------------------------------------------------
def cmd_invariants(args, write) -> int:
    if args.state_file:
        try:
            state = State.from_json(Path(args.state_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read state file: {exc}") from None
        if args.dims and state.dims != args.dims:
            raise UsageError(f"state file has dims {state.dims}, --dims says {args.dims}")
        dims = state.dims
    else:
        if not args.dims:
            raise UsageError("--generic needs --dims")
        dims = args.dims
        state = random_state(Support.full(dims), args.seed)
    if len(dims) > MAX_FULL_FAMILY_PARTIES and not args.principal_only:
        raise UsageError(f"the full family for n={len(dims)} is too large; pass --principal-only")
    if args.principal_only:
        result = {"dims": list(dims), "principal": principal_invariant(state)}
        principal = result["principal"]
    else:
        vec = invariant_vector(state)
        principal = vec.principal
        result = {"dims": list(dims), "vector": list(vec.values)}
    if len(dims) >= 3:
        result["formula_principal"] = conjectured_principal(dims)
        result["formula_agrees"] = result["formula_principal"] == principal
    text = json.dumps(result) if args.json else "\n".join(f"{k:>18}: {v}" for k, v in result.items())
    print(text)
    write("invariants.json", json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def cmd_walk(args, write) -> int:
    mode = "reverse" if args.reverse else "forward"
    ens = run_ensemble(args.dims, args.count, args.seed, mode=mode, threads=args.threads)
    reg = ens.registry
    trace = forward_walk(args.dims, derive_seed(args.seed, 0))
    heat = ens.heat_map()
    write("trace.csv", trace.to_csv(reg))
    write("visits.csv", "class,vector,count\n" + "".join(f"{l},{' '.join(map(str, v))},{c}\n" for l, v, c in ens.visit_counts()))
    write("heat.csv", heat.to_csv())
    write("heat.svg", figures.heat_map_svg(heat.masked(), heat.mean_class()))
    if mode == "reverse":
        cool = ens.heat_map(reverse=True)
        write("heat_reverse.csv", cool.to_csv())
        write("heat_reverse.svg", figures.heat_map_svg(cool.masked(), cool.mean_class(), "class occupation while cooling"))
    write("histogram.csv", ens.histogram_csv())
    write("histogram.svg", figures.histogram_svg(ens.histogram()))
    tc = ens.transition_counts()
    labels = reg.labels()
    names = [labels[v] for v in tc.labels]
    write("transitions.csv", "to/from," + ",".join(map(str, names)) + "\n" + "".join(
        f"{names[i]}," + ",".join(map(str, row)) + "\n" for i, row in enumerate(tc.counts)))
    summary = {
        "dims": list(args.dims),
        "walks": args.count,
        "classes": len(reg),
        "mean_steps": round(ens.mean_first_step(), 4),
        "std_error": round(ens.std_error(), 4),
        "mode_steps": ens.mode_first_step(),
        "min_steps": min(ens.first_steps),
    }
    try:
        P = from_counts(tc)
        P = StochasticMatrix(P.P, tuple(names))
        chain = analyze(P)
        write("markov.csv", P.to_csv())
        write("markov.dot", P.to_dot())
        write("expected_steps.csv", "class,q\n" + "".join(f"{n},{q:.6f}\n" for n, q in zip(names, chain.expected)))
        summary["markov_q0"] = round(float(chain.expected[0]), 4)
    except NotAbsorbingError as exc:
        summary["markov_q0"] = None
        print(f"warning: Markov analysis skipped: {exc}", file=sys.stderr)
    write("summary.json", json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_reproduce(args, write) -> int:
    targets = list(TARGETS) if args.target == "all" else [args.target]
    opt = Options(args.out, args.seed, args.threads, args.count, args.samples)
    failed = False
    for t in targets:
        rep = reproduce(t, opt)
        sys.stdout.write(rep.text())
        sys.stdout.flush()
        failed |= not rep.passed
    return EXIT_DIFF if failed else EXIT_OK


def cmd_family(args, write) -> int:
    fam = enumerate_family(args.n, allow_long=args.n >= 6)
    lines = [f"{k}: " + " ".join("{" + ",".join(map(str, sorted(mask_to_set(m)))) + "}" for m in T) for k, T in enumerate(fam.antichains)]
    if args.count_only:
        print(len(fam))
    else:
        print("\n".join(lines))
    write("family.json", json.dumps({"n": args.n, "antichains": fam.to_lists()}) + "\n")
    return EXIT_OK


def cmd_enumerate(args, write) -> int:
    dist = enumerate_patterns(args.dims, args.seed)
    for r in dist.registry.canonical_records():
        print(f"C{r.label}: {r.vector} count={r.visit_count} min_length={r.min_observed_length}")
    write("patterns.csv", dist.to_csv())
    write("patterns.svg", figures.stacked_bars_svg(dist.rows()))
    return EXIT_OK


def cmd_min_length(args, write) -> int:
    res = min_length(args.dims, args.mode, args.samples, args.seed)
    out = {
        "dims": list(args.dims),
        "length": res.length,
        "exact": res.exact,
        "witness": res.witness.to_list() if res.witness is not None else None,
    }
    if len(args.dims) == 3:
        out["formula_length"] = conjectured_min_length(args.dims)
    print(json.dumps(out))
    write("min_length.json", json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_construct(args, write) -> int:
    state = sn_symmetric_state(args.n, args.d, corner=args.corner)
    vec = invariant_vector(state) if args.n <= MAX_FULL_FAMILY_PARTIES else None
    out = {
        "dims": list(state.dims),
        "length": state.length,
        "principal": vec.principal if vec else principal_invariant(state),
        "is_mes": is_mes(state) if vec else None,
    }
    print(json.dumps(out))
    write("state.json", state.to_json() + "\n")
    write("construct.json", json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_fraction(args, write) -> int:
    sizes = list(range(1, args.max_size + 1))
    grid = fraction_grid(args.d1, sizes, args.count, args.seed, args.threads)
    rows = ["d2/d3," + ",".join(map(str, sizes))]
    rows += [f"{d2}," + ",".join(f"{x:.4f}" for x in grid[a]) for a, d2 in enumerate(sizes)]
    print("\n".join(rows))
    write("fraction.csv", "\n".join(rows) + "\n")
    write("fraction.svg", figures.grid_svg(grid, sizes, sizes))
    return EXIT_OK


def cmd_markov(args, write) -> int:
    lines = [ln for ln in Path(args.matrix).read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    M = np.array([[float(x) for x in ln.split(",")[1:]] for ln in lines[1:]])
    P = StochasticMatrix.normalized(M, tuple(header[1:])) if args.normalize else StochasticMatrix(M, tuple(header[1:]))
    chain = analyze(P)
    print("class,q")
    for lab, q in zip(P.labels, chain.expected):
        print(f"{lab},{q:.6f}")
    write("expected_steps.csv", "class,q\n" + "".join(f"{l},{q:.6f}\n" for l, q in zip(P.labels, chain.expected)))
    write("fundamental.csv", "\n".join(",".join(f"{x:.6f}" for x in row) for row in chain.fundamental) + "\n")
    write("markov.dot", P.to_dot())
    return EXIT_OK


# -- parser ------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mectools", description="Entanglement invariants, maximally entangled classes and random walks.")
    p.add_argument("--version", action="version", version=f"mectools {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, threads=False):
        sp.add_argument("--out", type=Path, default=None, help="output directory (a manifest.json is written there)")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="64-bit seed (default: ET_SEED or 0)")
        if threads:
            sp.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")

    sp = sub.add_parser("invariants", help="invariant vector of a state")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--state-file", help="state JSON")
    src.add_argument("--generic", action="store_true", help="random full-support state")
    sp.add_argument("--dims", type=_dims)
    sp.add_argument("--principal-only", action="store_true")
    sp.add_argument("--json", action="store_true", help="print JSON instead of aligned text")
    common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("walk", help="random-walk ensemble with Markov analysis")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--count", type=int, default=10_000)
    sp.add_argument("--reverse", action="store_true", help="also cool each walk back to the vacuum")
    common(sp, threads=True)
    sp.set_defaults(func=cmd_walk)

    sp = sub.add_parser("reproduce", help="regenerate reference data and diff it")
    sp.add_argument("--target", required=True, choices=list(TARGETS) + ["all"])
    sp.add_argument("--count", type=int, default=None, help="override walk counts")
    sp.add_argument("--samples", type=int, default=None, help="override sample counts")
    common(sp, threads=True)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("family", help="list the invariant antichains for n parties")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count-only", action="store_true")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("enumerate", help="classify every support pattern")
    sp.add_argument("--dims", type=_dims, required=True)
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("min-length", help="shortest maximally entangled support")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--mode", choices=["exact", "monte-carlo"], default="exact")
    sp.add_argument("--samples", type=int, default=10_000)
    common(sp)
    sp.set_defaults(func=cmd_min_length)

    sp = sub.add_parser("construct", help="symmetric short state")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--corner", type=_dims, default=None, help="corner index, e.g. 2,3,4")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("fraction", help="support fraction at first arrival over a (d1, d2, d3) grid")
    sp.add_argument("--d1", type=int, required=True)
    sp.add_argument("--max-size", type=int, default=6)
    sp.add_argument("--count", type=int, default=1000)
    common(sp, threads=True)
    sp.set_defaults(func=cmd_fraction)

    sp = sub.add_parser("markov", help="analyse a column-stochastic matrix CSV")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--normalize", action="store_true", help="rescale columns (rounded input)")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_markov)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        if hasattr(args, "seed"):
            args.seed = default_seed() if args.seed is None else check_seed(args.seed)
        if args.out is not None:
            try:
                args.out.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise UsageError(f"output directory not writable: {exc}") from None
        write, files = _writer(args.out)
        code = args.func(args, write)
        if args.command == "reproduce" and args.out is not None:
            files += sorted(p.name for p in args.out.iterdir() if p.name != "manifest.json")
        _manifest(args.out, args, files, started)
        return code
    except UsageError as exc:
        print(f"mectools: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, DimensionError, KeyError, ArithmeticError, RuntimeError, NotImplementedError) as exc:
        print(f"mectools: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
