"""Command-line harness: deterministic experiments over prime grids.

Subcommands
-----------
count       evaluate one counting average against its product main term
norm        directional uniformity norm of a stored grid function
weyl        averaged exponential sum of one polynomial with its bound
pet-trace   symbolic descent trace of a polynomial family file
scan        error-decay sweep over a prime range, CSV/JSONL plus a figure
find        search a stored or sampled set for a configuration instance

Exit codes: 0 success, 1 contract violation (bad inputs, failed parses,
stalled descent), 2 usage errors from the argument parser.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .charsum import weyl_sum
from .counting import ConfigurationSpec, counting_average, find_config, main_term, validate
from .fpcore import IntPoly, primes_between
from .gowers import gowers_norm
from .gridfn import GridFunction, SubsetMask, read_grid, read_mask
from .pet import PetError, PolyFamily, pet_trace

__all__ = ["main", "gen_function", "parse_spec", "read_family_file", "scan_error_decay"]

_KIND_CODES = {"rademacher": 1, "unit-circle": 2, "random-set": 3}

SQUARE_VECTORS = "1,0;0,1"
SQUARE_POLYS = "0,1|0,0,1"


# --- deterministic inputs ----------------------------------------------------


def gen_function(
    kind: str,
    p: int,
    D: int,
    seed: int,
    trial: int,
    index: int = 0,
    density: float = 0.5,
) -> GridFunction:
    """Seeded 1-bounded test function; identical arguments give identical values.

    `index` separates the several function slots used inside one trial.
    """
    if kind not in _KIND_CODES:
        raise ValueError(f"unknown function family {kind!r}; options: {sorted(_KIND_CODES)}")
    ss = np.random.SeedSequence(
        entropy=seed, spawn_key=(_KIND_CODES[kind], p, D, trial, index)
    )
    rng = np.random.default_rng(ss)
    n = p**D
    if kind == "rademacher":
        values = rng.integers(0, 2, n).astype(np.float64) * 2.0 - 1.0
    elif kind == "unit-circle":
        values = np.exp(2j * np.pi * rng.random(n))
    else:
        if not 0.0 < density <= 1.0:
            raise ValueError(f"set density {density} must be in (0, 1]")
        values = (rng.random(n) < density).astype(np.float64)
    return GridFunction(p, D, values)


# --- literals ----------------------------------------------------------------


def parse_vectors(text: str, dim: int) -> tuple:
    out = []
    for chunk in text.split(";"):
        coords = tuple(int(c) for c in chunk.split(","))
        if len(coords) != dim:
            raise ValueError(f"direction {chunk!r} has {len(coords)} coordinates, expected {dim}")
        out.append(coords)
    return tuple(out)


def parse_polys(text: str) -> tuple:
    return tuple(IntPoly.parse(chunk) for chunk in text.split("|"))


def parse_spec(dim: int, vectors: str, polys: str) -> ConfigurationSpec:
    return ConfigurationSpec(
        dimension=dim,
        directions=parse_vectors(vectors, dim),
        polynomials=parse_polys(polys),
    )


def read_family_file(path: str) -> PolyFamily:
    """Family file: `t=<t> m=<m>` header, then t rows of m literals joined by `|`."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty family file")
    try:
        head = dict(part.split("=", 1) for part in lines[0].split())
        t, m = int(head["t"]), int(head["m"])
    except (KeyError, ValueError):
        raise ValueError(f"{path}: first line must look like 't=2 m=2'") from None
    if len(lines) != 1 + t:
        raise ValueError(f"{path}: expected {t} family rows, found {len(lines) - 1}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        literals = [chunk.strip() for chunk in line.split("|")]
        if len(literals) != m:
            raise ValueError(f"{path}:{lineno}: expected {m} entries, found {len(literals)}")
        rows.append(tuple(IntPoly.parse(lit) for lit in literals))
    return PolyFamily(rows=tuple(rows))


# --- subcommand bodies --------------------------------------------------------


def _load_or_generate(args, spec, p) -> list:
    needed = spec.m + 1
    if args.fn:
        if len(args.fn) != needed:
            raise ValueError(f"need {needed} function files (anchor plus one per point), got {len(args.fn)}")
        fns = [read_grid(path) for path in args.fn]
        for f in fns:
            if (f.p, f.D) != (p, spec.dimension):
                raise ValueError(f"function on grid p={f.p} D={f.D}, expected p={p} D={spec.dimension}")
        return fns
    return [
        gen_function(args.family, p, spec.dimension, args.seed, args.trial, index=i, density=args.density)
        for i in range(needed)
    ]


def cmd_count(args) -> int:
    spec = parse_spec(args.dim, args.vectors, args.polys)
    validate(spec, args.prime)
    fns = _load_or_generate(args, spec, args.prime)
    counting = counting_average(spec, args.prime, fns)
    main_value = main_term(spec, args.prime, fns)
    err = abs(counting - main_value)
    print(
        json.dumps(
            {
                "p": args.prime,
                "counting": [counting.real, counting.imag],
                "main": [main_value.real, main_value.imag],
                "abs_error": err,
            }
        )
    )
    return 0


def cmd_norm(args) -> int:
    f = read_grid(args.fn)
    if f.p != args.prime or f.D != args.dim:
        raise ValueError(f"function on grid p={f.p} D={f.D}, flags say p={args.prime} D={args.dim}")
    v = tuple(int(c) for c in args.vector.split(","))
    value = gowers_norm(f, v, args.degree)
    print(f"{value:.12g}")
    return 0


def cmd_weyl(args) -> int:
    poly = IntPoly.parse(args.poly)
    res = weyl_sum(poly, args.prime)
    if res.bound is None:
        print(f"modulus {res.modulus:.6f}, no square-root bound for reduced degree {res.reduced_degree}")
        return 0
    verdict = "pass" if res.within_bound(args.tol) else "FAIL"
    print(
        f"modulus {res.modulus:.6f}, bound {res.bound:.6f} "
        f"(reduced degree {res.reduced_degree}), verdict {verdict}"
    )
    return 0 if verdict == "pass" else 1


def cmd_pet_trace(args) -> int:
    family = read_family_file(args.family)
    try:
        steps = pet_trace(family, max_steps=args.max_steps)
        failure = None
    except PetError as exc:
        steps = exc.steps
        failure = str(exc).splitlines()[0]
    for k, step in enumerate(steps, start=1):
        subtracted = ", ".join(str(q) for q in step.subtracted)
        print(f"step {k}: subtract ({subtracted}) at row {step.pivot_row + 1}")
        print(f"  type {step.type_before} -> {step.type_after}")
    if failure is None:
        final = steps[-1].result.normalized() if steps else family.normalized()
        print(f"terminated after {len(steps)} steps at degree-1 family:")
        for row in final.rows:
            print("  " + "  |  ".join(str(e) for e in row))
    else:
        print(f"descent failed after {len(steps)} steps: {failure}")
    for k, step in enumerate(steps, start=1):
        print(
            json.dumps(
                {
                    "step": k,
                    "subtracted": [str(q) for q in step.subtracted],
                    "type_before": [list(r) for r in step.type_before.rows],
                    "type_after": [list(r) for r in step.type_after.rows],
                    "degenerate_shifts": list(step.raw.degenerate_shifts()),
                }
            )
        )
    return 0 if failure is None else 1


def cmd_find(args) -> int:
    spec = parse_spec(args.dim, args.vectors, args.polys)
    validate(spec, args.prime)
    if args.mask:
        mask = read_mask(args.mask)
        if (mask.p, mask.D) != (args.prime, args.dim):
            raise ValueError(f"mask on grid p={mask.p} D={mask.D}, flags say p={args.prime} D={args.dim}")
    else:
        bits = gen_function("random-set", args.prime, args.dim, args.seed, args.trial, density=args.density)
        mask = SubsetMask(args.prime, args.dim, bits.values.real >= 0.5)
    witness = find_config(spec, args.prime, mask)
    if witness is None:
        print(json.dumps({"witness": None, "density": mask.density()}))
        return 0
    x, y = witness
    print(json.dumps({"witness": {"x": list(x), "y": y}, "density": mask.density()}))
    return 0


# --- the scan ------------------------------------------------------------------


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


_SCAN_DEFAULTS = {
    "dim": 2,
    "vectors": SQUARE_VECTORS,
    "polys": SQUARE_POLYS,
    "pmin": 11,
    "pmax": 199,
    "trials": 20,
    "seed": 42,
    "family": "rademacher",
    "density": 0.5,
    "envelope": None,
    "out": "scan.csv",
}

_SCAN_INT_KEYS = {"dim", "pmin", "pmax", "trials", "seed"}
_SCAN_FLOAT_KEYS = {"density", "envelope"}


def _merge_scan_config(args) -> dict:
    cfg = dict(_SCAN_DEFAULTS)
    if args.config:
        for key, value in _read_config_file(args.config).items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    for key in _SCAN_INT_KEYS:
        cfg[key] = int(cfg[key])
    for key in _SCAN_FLOAT_KEYS:
        if cfg[key] is not None:
            cfg[key] = float(cfg[key])
    return cfg


def _fit_decay(per_prime_max: dict) -> "float | str":
    """Least-squares slope of log(max error) against log p, sign flipped."""
    points = [(p, e) for p, e in sorted(per_prime_max.items()) if e > 0.0]
    if not points and per_prime_max:
        return "exact"
    if len(points) < 2:
        return "undefined"
    logs_p = np.log([p for p, _ in points])
    logs_e = np.log([e for _, e in points])
    slope = np.polyfit(logs_p, logs_e, 1)[0]
    return float(-slope)


def _render_scan_figure(rows, per_prime_max, c_hat, envelope, fig_path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.scatter(
        [r["p"] for r in rows],
        [max(r["abs_error"], 1e-17) for r in rows],
        s=9,
        alpha=0.35,
        label="trials",
    )
    primes = sorted(per_prime_max)
    maxima = [max(per_prime_max[p], 1e-17) for p in primes]
    ax.plot(primes, maxima, "o-", color="tab:red", markersize=4, label="max per prime")
    if isinstance(c_hat, float):
        anchor = maxima[0] * (primes[0] ** c_hat)
        ax.plot(
            primes,
            [anchor * p ** (-c_hat) for p in primes],
            "--",
            color="tab:gray",
            label=f"fit p^-{c_hat:.3f}",
        )
    if envelope is not None:
        ax.plot(
            primes,
            [p ** (-envelope) for p in primes],
            ":",
            color="tab:green",
            label=f"envelope p^-{envelope:g}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("prime p")
    ax.set_ylabel("|counting - main term|")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=130)
    plt.close(fig)


def scan_error_decay(cfg: dict, plot: bool = True, out_stream=None) -> dict:
    """Sweep primes, stream rows, fit the decay exponent, render the figure.

    Returns a summary dict with the fitted exponent, per-prime maxima, row
    count, and output paths.  Rows are written as they are computed so a
    partial run still leaves a readable CSV prefix.
    """
    spec = parse_spec(cfg["dim"], cfg["vectors"], cfg["polys"])
    if cfg["trials"] < 1:
        raise ValueError(f"trials {cfg['trials']} must be >= 1")
    primes = []
    for p in primes_between(cfg["pmin"], cfg["pmax"]):
        try:
            validate(spec, p)
        except ValueError as exc:
            print(f"skipping p={p}: {exc}", file=sys.stderr)
            continue
        primes.append(p)
    if not primes:
        raise ValueError(f"no usable primes in [{cfg['pmin']}, {cfg['pmax']}]")

    out_path = cfg["out"]
    jsonl_path = out_path.rsplit(".", 1)[0] + ".jsonl"
    fig_path = out_path.rsplit(".", 1)[0] + ".png"
    needed = spec.m + 1
    rows = []
    per_prime_max: dict = {}
    header = [
        "# fpcombi error-decay scan",
        f"# generator=PCG64 numpy={np.__version__}",
        f"# seed={cfg['seed']} family={cfg['family']} density={cfg['density']}"
        f" dim={cfg['dim']} vectors={cfg['vectors']} polys={cfg['polys']}"
        f" pmin={cfg['pmin']} pmax={cfg['pmax']} trials={cfg['trials']}",
        "p,trial,counting_re,counting_im,main_re,main_im,abs_error,runtime_ms",
    ]
    with open(out_path, "w") as csv_fh, open(jsonl_path, "w") as jsonl_fh:
        for line in header:
            print(line, file=csv_fh)
        for p in primes:
            for trial in range(cfg["trials"]):
                fns = [
                    gen_function(
                        cfg["family"], p, cfg["dim"], cfg["seed"], trial,
                        index=i, density=cfg["density"],
                    )
                    for i in range(needed)
                ]
                t0 = time.perf_counter()
                counting = counting_average(spec, p, fns)
                main_value = main_term(spec, p, fns)
                runtime_ms = (time.perf_counter() - t0) * 1e3
                row = {
                    "p": p,
                    "trial": trial,
                    "counting_re": counting.real,
                    "counting_im": counting.imag,
                    "main_re": main_value.real,
                    "main_im": main_value.imag,
                    "abs_error": abs(counting - main_value),
                    "runtime_ms": runtime_ms,
                }
                rows.append(row)
                per_prime_max[p] = max(per_prime_max.get(p, 0.0), row["abs_error"])
                print(
                    "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f"
                    % (
                        p, trial, row["counting_re"], row["counting_im"],
                        row["main_re"], row["main_im"], row["abs_error"], runtime_ms,
                    ),
                    file=csv_fh,
                )
                print(json.dumps(row), file=jsonl_fh)
                csv_fh.flush()
            if out_stream is not None:
                print(f"p={p}: max |error| = {per_prime_max[p]:.3e}", file=out_stream)

    c_hat = _fit_decay(per_prime_max)
    if plot:
        _render_scan_figure(rows, per_prime_max, c_hat, cfg["envelope"], fig_path)
    summary = {
        "rows": len(rows),
        "primes": len(primes),
        "c_hat": c_hat,
        "per_prime_max": per_prime_max,
        "csv": out_path,
        "jsonl": jsonl_path,
        "figure": fig_path if plot else None,
    }
    return summary


def cmd_scan(args) -> int:
    cfg = _merge_scan_config(args)
    summary = scan_error_decay(cfg, plot=not args.no_plot, out_stream=sys.stdout)
    if isinstance(summary["c_hat"], float):
        print(f"fitted decay exponent c = {summary['c_hat']:.4f}")
    else:
        print(f"fitted decay exponent: {summary['c_hat']}")
    print(f"wrote {summary['rows']} rows to {summary['csv']} (mirror {summary['jsonl']})")
    if summary["figure"]:
        print(f"figure: {summary['figure']}")
    return 0


# --- wiring --------------------------------------------------------------------


def _add_spec_flags(sub, dim_default=2):
    sub.add_argument("--dim", type=int, default=dim_default, help="grid dimension D")
    sub.add_argument("--vectors", default=SQUARE_VECTORS, help="directions, e.g. '1,0;0,1'")
    sub.add_argument("--polys", default=SQUARE_POLYS, help="coefficient lists low-to-high, e.g. '0,1|0,0,1'")


def _add_gen_flags(sub):
    sub.add_argument("--family", default="rademacher", choices=sorted(_KIND_CODES))
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trial", type=int, default=0)
    sub.add_argument("--density", type=float, default=0.5, help="set density for random-set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpcombi",
        description="Counting, uniformity norms, and descent experiments on prime grids.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("count", help="counting average vs product main term")
    c.add_argument("--prime", type=int, required=True)
    _add_spec_flags(c)
    c.add_argument("--fn", action="append", help="grid function file; repeat m+1 times")
    _add_gen_flags(c)
    c.set_defaults(run=cmd_count)

    n = subs.add_parser("norm", help="directional uniformity norm of a stored function")
    n.add_argument("--prime", type=int, required=True)
    n.add_argument("--dim", type=int, required=True)
    n.add_argument("--vector", required=True, help="direction, e.g. '1,0'")
    n.add_argument("--degree", type=int, required=True, help="norm degree s >= 1")
    n.add_argument("--fn", required=True, help="grid function file")
    n.set_defaults(run=cmd_norm)

    w = subs.add_parser("weyl", help="averaged exponential sum and its bound")
    w.add_argument("--prime", type=int, required=True)
    w.add_argument("--poly", required=True, help="coefficients low-to-high, e.g. '0,0,1'")
    w.add_argument("--tol", type=float, default=1e-12)
    w.set_defaults(run=cmd_weyl)

    pt = subs.add_parser("pet-trace", help="symbolic descent trace of a family file")
    pt.add_argument("--family", required=True, help="family file; see docs for the format")
    pt.add_argument("--max-steps", type=int, default=50)
    pt.set_defaults(run=cmd_pet_trace)

    s = subs.add_parser("scan", help="error-decay sweep over a prime range")
    s.add_argument("--config", help="key=value file; flags override it")
    s.add_argument("--dim", type=int, default=None)
    s.add_argument("--vectors", default=None)
    s.add_argument("--polys", default=None)
    s.add_argument("--pmin", type=int, default=None)
    s.add_argument("--pmax", type=int, default=None)
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--family", choices=sorted(_KIND_CODES), default=None)
    s.add_argument("--density", type=float, default=None)
    s.add_argument("--envelope", type=float, default=None, help="reference decay exponent drawn on the figure")
    s.add_argument("--out", default=None, help="CSV path; JSONL and PNG go next to it")
    s.add_argument("--no-plot", action="store_true", help="skip the figure")
    s.set_defaults(run=cmd_scan)

    f = subs.add_parser("find", help="first configuration instance inside a set")
    f.add_argument("--prime", type=int, required=True)
    _add_spec_flags(f)
    f.add_argument("--mask", help="mask file; omit to sample a random set")
    _add_gen_flags(f)
    f.set_defaults(run=cmd_find)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
