"""Command line front end.

Subcommands::

    cme scv PARAMS.json
    cme eval PARAMS.json --grid 0:10:0.1
    cme optimize --n 10 --strategy cma_es --seed 1 --budget 20000 --out best.json
    cme heuristic --n 50 --out best.json
    cme export PARAMS.json --format {matrix,spectral,hypertrig,samples} --out FILE
    cme sweep --n 2:10 --mode full --out table.csv

Parameter files are JSON ``{"n": int, "omega": "<decimal>", "phi": ["<decimal>", ...]}``;
numbers are accepted in place of decimal strings.  Exit codes: 0 success,
2 input error, 3 numeric failure, 130 interrupt.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from decimal import Decimal, InvalidOperation
from pathlib import Path

import gmpy2
import numpy as np

from .analysis import DegenerateFormError, moments
from .core import CosineSquareForm, HyperTrigForm, PrecisionContext, eval_product
from .heuristic import optimize_heuristic
from .hypertrig import to_hypertrig
from .optimize import OptConfig, OptResult, Strategy, optimize_full
from .precision import PrecisionPolicy, required_digits
from .reps import matrix_form

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_INTERRUPT = 130

SWEEP_COLUMNS = ["n", "N", "scv", "omega", "evals", "seconds", "mode"]
# same defaults as the optimize and heuristic commands
SWEEP_BUDGET = {"full": 20_000, "heuristic": 5_000}


class InputError(Exception):
    pass


# -- file formats -------------------------------------------------------------

def atomic_write(path, text: str):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _decimal(value, field: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise InputError(f"field '{field}' must be a decimal string or number, got {value!r}")
    try:
        d = Decimal(str(value).strip())
    except InvalidOperation:
        raise InputError(f"field '{field}' is not a decimal number: {value!r}") from None
    if not d.is_finite():
        raise InputError(f"field '{field}' must be finite, got {value!r}")
    return str(value).strip() if isinstance(value, str) else repr(value)


def parse_params(data) -> CosineSquareForm:
    """Validate a decoded parameter document and build the form."""
    if not isinstance(data, dict):
        raise InputError("parameter file must hold a JSON object")
    for key in ("n", "omega", "phi"):
        if key not in data:
            raise InputError(f"missing field '{key}'")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"field 'n' must be a positive integer, got {n!r}")
    omega = _decimal(data["omega"], "omega")
    if not Decimal(omega) > 0:
        raise InputError(f"field 'omega' must be positive, got {omega}")
    phi = data["phi"]
    if not isinstance(phi, list):
        raise InputError("field 'phi' must be a list")
    if len(phi) != n:
        raise InputError(f"field 'phi' has {len(phi)} entries but n={n}")
    phis = tuple(_decimal(p, f"phi[{i}]") for i, p in enumerate(phi))
    return CosineSquareForm(n, omega, phis)


def load_params(path) -> CosineSquareForm:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    return parse_params(data)


def _mpstr(x) -> str:
    if isinstance(x, gmpy2.mpfr):
        digits = math.ceil(x.precision / math.log2(10)) + 1
        return f"{x:.{digits}g}" if x != 0 else "0"
    return repr(float(x)) if isinstance(x, float) else str(x)


def params_document(form: CosineSquareForm, **extra) -> dict:
    doc = {"n": form.n, "omega": _mpstr(form.omega), "phi": [_mpstr(p) for p in form.phis]}
    doc.update(extra)
    return doc


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def hypertrig_document(form: HyperTrigForm, digits: int) -> dict:
    return {
        "n": form.n,
        "omega": _mpstr(form.omega),
        "digits": digits,
        "c": _mpstr(form.c),
        "a": [_mpstr(v) for v in form.a],
        "b": [_mpstr(v) for v in form.b],
    }


def load_hypertrig(path) -> tuple[HyperTrigForm, PrecisionContext]:
    """Read a hypertrig export back at the precision it was written with."""
    with open(path) as fh:
        doc = json.load(fh)
    ctx = PrecisionContext(int(doc["digits"]))
    with ctx.local():
        mp = gmpy2.mpfr
        form = HyperTrigForm(int(doc["n"]), mp(doc["omega"]), mp(doc["c"]),
                             np.array([mp(v) for v in doc["a"]], dtype=object),
                             np.array([mp(v) for v in doc["b"]], dtype=object))
    return form, ctx


def _csv(rows, header=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trace_csv(result: OptResult) -> str:
    return _csv([(i, repr(f)) for i, f in result.history], header=["eval", "best_scv"])


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of ``stop``) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, step = (float(v) for v in spec.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            grid = start + step * np.arange(count)
        else:
            grid = np.array([float(v) for v in spec.split(",")])
    except ValueError:
        raise InputError(f"bad --grid {spec!r}; expected start:stop:step or a comma list") from None
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise InputError("--grid values must be finite and non-negative")
    return grid


def parse_range(spec: str) -> list[int]:
    try:
        if ":" in spec:
            lo, hi = (int(v) for v in spec.split(":"))
            values = list(range(lo, hi + 1))
        else:
            values = [int(v) for v in spec.split(",")]
    except ValueError:
        raise InputError(f"bad --n range {spec!r}; expected lo:hi or a comma list") from None
    if not values or min(values) < 1:
        raise InputError("--n values must be positive")
    return values


# -- commands -----------------------------------------------------------------

def _policy(args) -> PrecisionPolicy:
    policy = PrecisionPolicy.from_env()
    if getattr(args, "digits_margin", None) is not None:
        policy = PrecisionPolicy(base_margin=args.digits_margin)
    return policy


def cmd_scv(args, out):
    form = load_params(args.params)
    policy = _policy(args)
    digits = required_digits(form.n, policy)
    ctx = PrecisionContext(digits)
    m = moments(to_hypertrig(form, ctx, policy), ctx)
    scv = float(m.scv)
    if not math.isfinite(scv):
        raise ArithmeticError(f"non-finite SCV {scv}")
    print(f"scv {scv!r}", file=out)
    print(f"mu0 {float(m.mu0)!r}", file=out)
    print(f"mu1 {float(m.mu1)!r}", file=out)
    print(f"mu2 {float(m.mu2)!r}", file=out)
    print(f"N {form.order}", file=out)
    print(f"digits {digits}", file=out)


def cmd_eval(args, out):
    form = load_params(args.params)
    grid = parse_grid(args.grid)
    values = eval_product(form, grid)
    for t, f in zip(grid, np.atleast_1d(values)):
        print(f"{float(t)!r} {float(f)!r}", file=out)


def _opt_config(args) -> OptConfig:
    return OptConfig(strategy=Strategy(args.strategy), max_evals=args.budget, seed=args.seed,
                     sigma0=args.sigma0, restarts=args.restarts, target_scv=args.target,
                     workers=args.jobs, policy=_policy(args))


def cmd_optimize(args, out, heuristic=False):
    if args.n < 1:
        raise InputError("--n must be positive")
    cfg = _opt_config(args)
    heuristic = heuristic or args.heuristic
    result = optimize_heuristic(args.n, cfg) if heuristic else optimize_full(args.n, cfg)
    extra = {
        "scv": repr(result.best_scv),
        "evals": result.evals_used,
        "seed": result.seed,
        "mode": "heuristic" if heuristic else "full",
        "strategy": cfg.strategy.value,
    }
    if result.layout is not None:
        extra["layout"] = {"omega": repr(result.layout.omega), "p": repr(result.layout.p),
                           "w": repr(result.layout.w)}
    if args.out:
        atomic_write(args.out, dump_json(params_document(result.best_form, **extra)))
        trace = args.trace or str(Path(args.out).with_suffix(".trace.csv"))
        atomic_write(trace, trace_csv(result))
    print(f"scv {result.best_scv!r}", file=out)
    print(f"omega {float(result.best_form.omega)!r}", file=out)
    print(f"evals {result.evals_used}", file=out)


def cmd_export(args, out):
    form = load_params(args.params)
    policy = _policy(args)
    digits = required_digits(form.n, policy)
    ctx = PrecisionContext(digits)
    dest = Path(args.out) if args.out else None

    def emit(text, path=dest):
        if path is None:
            out.write(text)
        else:
            atomic_write(path, text)

    if args.format == "samples":
        grid = parse_grid(args.grid)
        values = np.atleast_1d(eval_product(form, grid))
        emit(_csv([(repr(float(t)), repr(float(f))) for t, f in zip(grid, values)], header=["t", "f"]))
        return
    ht = to_hypertrig(form, ctx, policy)
    if args.format == "hypertrig":
        emit(dump_json(hypertrig_document(ht, digits)))
    elif args.format == "spectral":
        rows = [("-1", "0", _mpstr(ht.c), "0")]
        with ctx.local():
            omega = gmpy2.mpfr(ht.omega)
            for k in range(1, ht.n + 1):
                re, im = ht.a[k - 1] / 2, ht.b[k - 1] / 2
                rows.append(("-1", _mpstr(-k * omega), _mpstr(re), _mpstr(im)))
                rows.append(("-1", _mpstr(k * omega), _mpstr(re), _mpstr(-im)))
        emit(_csv(rows, header=["eig_re", "eig_im", "weight_re", "weight_im"]))
    elif args.format == "matrix":
        mf = matrix_form(ht)
        beta = [_mpstr(b) for b in mf.beta]
        dense = _csv([beta] + [[repr(float(v)) for v in row] for row in mf.dense_B()])
        doc = dump_json({"n": mf.n, "N": mf.size, "omega": _mpstr(mf.omega), "beta": beta})
        if dest is None:
            out.write(dense)
            out.write(doc)
        else:
            emit(doc)
            emit(dense, dest.with_suffix(".csv"))
    else:
        raise InputError(f"unknown --format {args.format!r}")


def _sweep_row(n, mode, cfg: OptConfig):
    start = time.perf_counter()
    result = optimize_heuristic(n, cfg) if mode == "heuristic" else optimize_full(n, cfg)
    seconds = time.perf_counter() - start
    return [n, 2 * n + 1, repr(result.best_scv), repr(float(result.best_form.omega)),
            result.evals_used, f"{seconds:.3f}", mode]


def cmd_sweep(args, out):
    ns = parse_range(args.n)
    if args.mode not in ("full", "heuristic"):
        raise InputError(f"--mode must be full or heuristic, got {args.mode!r}")
    budget = SWEEP_BUDGET[args.mode] if args.budget is None else args.budget
    cfg = OptConfig(strategy=Strategy(args.strategy), max_evals=budget, seed=args.seed,
                    sigma0=args.sigma0, restarts=args.restarts, policy=_policy(args))
    rows = {}

    def flush():
        table = _csv([rows[n] for n in sorted(rows)], header=SWEEP_COLUMNS)
        if args.out:
            atomic_write(args.out, table)
        return table

    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                futures = {pool.submit(_sweep_row, n, args.mode, cfg): n for n in ns}
                for fut in as_completed(futures):
                    rows[futures[fut]] = fut.result()
                    flush()
        else:
            for n in ns:
                rows[n] = _sweep_row(n, args.mode, cfg)
                flush()
    finally:
        table = flush()
    if not args.out:
        out.write(table)


# -- argument parsing ---------------------------------------------------------

def _add_common(p):
    p.add_argument("--digits-margin", type=int, default=None,
                   help="extra decimal digits beyond the predicted loss "
                        "(default: $CME_DEFAULT_DIGITS_MARGIN or 16)")


def _add_search(p, budget):
    p.add_argument("--strategy", default="cma_es", choices=[s.value for s in Strategy])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=budget,
                   help=f"objective evaluations (default: {budget or 'by mode'})")
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--sigma0", type=float, default=0.3)
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cme", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scv", help="SCV and moments of a parameter file")
    p.add_argument("params")
    _add_common(p)

    p = sub.add_parser("eval", help="evaluate f(t) on a grid")
    p.add_argument("params")
    p.add_argument("--grid", default="0:10:0.1")

    for name, budget in (("optimize", 20_000), ("heuristic", 5_000)):
        p = sub.add_parser(name, help=f"{name} search for a low-SCV form")
        p.add_argument("--n", type=int, required=True)
        _add_search(p, budget)
        p.add_argument("--target", type=float, default=None, help="stop once the SCV drops below")
        p.add_argument("--out", default=None, help="best form as a JSON parameter file")
        p.add_argument("--trace", default=None, help="best-so-far trace CSV (default: OUT.trace.csv)")
        if name == "optimize":
            p.add_argument("--heuristic", action="store_true", help="run the 3-parameter search")
        else:
            p.set_defaults(heuristic=True)
        _add_common(p)

    p = sub.add_parser("export", help="export a representation")
    p.add_argument("params")
    p.add_argument("--format", required=True, choices=["matrix", "spectral", "hypertrig", "samples"])
    p.add_argument("--out", default=None)
    p.add_argument("--grid", default="0:10:0.1")
    _add_common(p)

    p = sub.add_parser("sweep", help="tabulate optimized SCV over a range of n")
    p.add_argument("--n", required=True, help="lo:hi or comma list")
    p.add_argument("--mode", default="full", choices=["full", "heuristic"])
    p.add_argument("--out", default=None)
    _add_search(p, None)
    _add_common(p)
    return parser


COMMANDS = {
    "scv": cmd_scv,
    "eval": cmd_eval,
    "optimize": cmd_optimize,
    "heuristic": cmd_optimize,
    "export": cmd_export,
    "sweep": cmd_sweep,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPT
    except (ArithmeticError, DegenerateFormError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
