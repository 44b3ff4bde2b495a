"""``regenstruct`` command line.

Exit status: 0 on success, 2 on a validation or domain failure, 3 when the
verdict is that the structure is not regenerative.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter
from math import sqrt

from . import io
from .chains import exact_chain, simulate_chain, stationary
from .core import (
    RegenError,
    ValidationError,
    as_fraction,
    enumerate_compositions,
    format_fraction,
    make_rng,
    override_limits,
)
from .eppf import TwoParamModel
from .kernels import kernel_table, parse_kernel, q_from_p_d, regen_residual
from .paintbox import (
    UnsupportedSpec,
    _jump_sampler,
    decrement_from_paintbox,
    laplace_exponent,
    phi_nr,
    sample_composition_via_paintbox,
)
from .regen import (
    NotRegenerative,
    composition_probability,
    full_matrix,
    hypgeom_project,
    regenerativity_check,
    sample_composition,
)

EXIT_OK, EXIT_INVALID, EXIT_NO = 0, 2, 3


class Output:
    """Collects stdout text so that every run writes through one channel."""

    def __init__(self, stream, digits: int):
        self.stream = stream
        self.digits = digits

    def dec(self, q) -> str:
        return io.to_decimal(q, self.digits)

    def table(self, header, rows):
        w = csv.writer(self.stream, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    def json(self, obj):
        self.stream.write(json.dumps(obj, indent=2) + "\n")

    def line(self, text: str):
        self.stream.write(text + "\n")


def _arr(seq) -> str:
    return json.dumps(list(seq), separators=(",", ":"))


# --------------------------------------------------------------------------
# model selection

def _model_args(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_argument_group("model source (exactly one)")
    g.add_argument("--alpha", help="two-parameter alpha (default 0 with --theta)")
    g.add_argument("--theta", help="two-parameter or Ewens theta")
    g.add_argument("--extended", action="store_true",
                   help="admit 0<alpha<1, theta>-alpha (not regenerative)")
    g.add_argument("--model", help="model JSON, inline or a path")
    g.add_argument("--paintbox", help="Levy measure spec JSON, inline or a path")
    g.add_argument("--decrement", help="decrement matrix JSON file")
    g.add_argument("--p-file", dest="p_file", help="partition probabilities JSON file")
    g.add_argument("--q-row", dest="q_row", help='decrement row at level n, e.g. "1/3,1/3,1/3"')
    p.set_defaults(_model_required=required)


def resolve_model(args) -> io.ModelSpec | None:
    chosen = [name for name in ("model", "paintbox", "decrement", "p_file", "q_row")
              if getattr(args, name, None) is not None]
    if getattr(args, "theta", None) is not None or getattr(args, "alpha", None) is not None:
        chosen.append("alpha/theta")
    if len(chosen) > 1:
        raise ValidationError(f"give exactly one model source, got {', '.join(chosen)}")
    if not chosen:
        if args._model_required:
            raise ValidationError("a model source is required")
        return None
    src = chosen[0]
    if src == "alpha/theta":
        if args.theta is None:
            raise ValidationError("--alpha needs --theta")
        alpha = as_fraction(args.alpha) if args.alpha is not None else None
        model = TwoParamModel(alpha or 0, args.theta, args.extended)
        return io.ModelSpec("ewens" if alpha is None else "two-parameter", model)
    if src == "model":
        return io.model_from_json(args.model, args.extended)
    if src == "paintbox":
        return io.ModelSpec("paintbox", io.parse_spec(io.read_json(args.paintbox)))
    if src == "decrement":
        return io.ModelSpec("decrement", io.matrix_from_json(args.decrement))
    if src == "p_file":
        return io.ModelSpec("p-levels", io.levels_from_json(args.p_file))
    return io.ModelSpec("decrement", full_matrix(io.row_from_text(args.q_row)))


def _level(args, spec: io.ModelSpec) -> int:
    if args.n is not None:
        return args.n
    if spec.kind == "p-levels":
        return max(spec.payload)
    if spec.kind == "decrement":
        return spec.payload.n_max
    raise ValidationError("--n is required for this model source")


# --------------------------------------------------------------------------
# commands

def cmd_eppf(args, out: Output) -> int:
    spec = resolve_model(args)
    n = _level(args, spec)
    levels = spec.levels(n)
    if args.format == "pfile":
        out.json(io.levels_to_json(levels))
        return EXIT_OK
    dist = levels[n]
    rows = [(lam, p) for lam, p in dist.items() if p != 0 or args.all]
    total = dist.total()
    if args.format == "json":
        out.json({"n": n, "model": spec.describe(),
                  "rows": [{"partition": io.partition_to_json(lam), "prob": format_fraction(p),
                            "decimal": out.dec(p)} for lam, p in rows],
                  "sum": format_fraction(total)})
    else:
        out.table(["partition", "prob", "decimal"],
                  [(_arr(lam.parts), format_fraction(p), out.dec(p)) for lam, p in rows]
                  + [("sum", format_fraction(total), out.dec(total))])
    return EXIT_OK


def cmd_kernel(args, out: Output) -> int:
    k = parse_kernel(io.read_json(args.kernel) if args.kernel.lstrip().startswith(("{", "@"))
                     else args.kernel)
    spec = resolve_model(args)
    if spec is not None:
        n = _level(args, spec)
        q = q_from_p_d(spec.levels(n)[n], k)
        out.table(["x", "q", "decimal"], [(x, format_fraction(v), out.dec(v)) for x, v in enumerate(q, 1)])
        return EXIT_OK
    if args.n is None:
        raise ValidationError("--n is required")
    rows = kernel_table(k, args.n)
    if args.partition:
        want = io.partition_from_json(int(x) for x in args.partition.split(","))
        rows = [r for r in rows if r[0] == want]
    out.table(["partition", "part", "d", "decimal"],
              [(_arr(lam.parts), x, format_fraction(d), out.dec(d)) for lam, x, d in rows])
    return EXIT_OK


def cmd_decrement(args, out: Output) -> int:
    spec = resolve_model(args)
    Q = spec.matrix(_level(args, spec))
    if args.json:
        out.json(io.matrix_to_json(Q))
    else:
        out.table(["m", "x", "q", "decimal"],
                  [(m, x, format_fraction(v), out.dec(v))
                   for m, row in enumerate(Q.rows, 1) for x, v in enumerate(row, 1)])
    return EXIT_OK


def cmd_project(args, out: Output) -> int:
    spec = resolve_model(args)
    row = spec.decrement_row(_level(args, spec))
    targets = [args.m] if args.m is not None else range(1, row.n + 1)
    out.table(["m", "x", "q", "decimal"],
              [(m, x, format_fraction(v), out.dec(v))
               for m in targets for x, v in enumerate(hypgeom_project(row, m), 1)])
    return EXIT_OK


def cmd_regen_check(args, out: Output) -> int:
    spec = resolve_model(args)
    n = _level(args, spec)
    levels = spec.levels(n)
    verdict = regenerativity_check(levels)
    report: dict = {"n": n, "verdict": "Regenerative" if verdict else "No"}
    if verdict:
        report["matrix"] = io.matrix_to_json(verdict.matrix)
    else:
        w = verdict.witness
        report["witness"] = {"level": w.level, "item": str(w.item), "detail": w.detail}
    if args.kernel:
        res = regen_residual(levels, parse_kernel(args.kernel))
        report["kernel"] = args.kernel
        report["regen_residual"] = format_fraction(res.value)
        if res.value:
            lvl, lam, x = res.witness
            report["residual_witness"] = {"level": lvl, "partition": io.partition_to_json(lam), "part": x}
    out.json(report)
    return EXIT_OK if verdict else EXIT_NO


def cmd_chain(args, out: Output) -> int:
    spec = resolve_model(args)
    n = _level(args, spec)
    row = spec.decrement_row(n)
    show = (lambda s: str(s)) if args.kind == "fragperm" else (
        lambda s: list(s.parts) if args.kind == "partition" else list(s))
    if args.mode == "stationary":
        pi = stationary(exact_chain(args.kind, n, row))
        out.json({"kind": args.kind, "n": n, "mode": "stationary",
                  "states": [show(s) for s in pi],
                  "stationary": [format_fraction(p) for p in pi.values()],
                  "decimal": [out.dec(p) for p in pi.values()]})
        return EXIT_OK
    if args.kind == "fragperm":
        raise ValidationError("simulation supports composition and partition chains")
    rep = simulate_chain(args.kind, n, row, args.steps, args.burn_in, args.seed)
    dev = rep.deviations(3.0)
    out.json({"kind": args.kind, "n": n, "mode": "simulate", "seed": args.seed,
              "steps": args.steps, "burn_in": args.burn_in,
              "states": [list(s) for s, *_ in dev],
              "exact": [format_fraction(rep.exact[s]) for s, *_ in dev],
              "counts": [c for _, c, *_ in dev],
              "expected": [round(e, 3) for _, _, e, _, _ in dev],
              "sd": [round(sd, 3) for *_, sd, _ in dev],
              "within_3sd": [w for *_, w in dev],
              "all_within_3sd": all(w for *_, w in dev)})
    return EXIT_OK


def cmd_sample(args, out: Output) -> int:
    spec = resolve_model(args)
    n = args.n
    if n is None:
        raise ValidationError("--n is required")
    rng = make_rng(args.seed)
    if args.method == "paintbox":
        if spec.kind != "paintbox":
            raise ValidationError("--method paintbox needs a paintbox model")
        draw = _jump_sampler(spec.payload)
        Q = full_matrix(decrement_from_paintbox(spec.payload, n))
        gen = (sample_composition_via_paintbox(spec.payload, n, rng, _draw=draw) for _ in range(args.count))
    else:
        Q = spec.matrix(n)
        gen = (sample_composition(Q, n, rng) for _ in range(args.count))
    if not args.frequencies:
        for c in gen:
            out.line(_arr(c))
        return EXIT_OK
    counts = Counter(gen)
    N = args.count
    rows = []
    for c in enumerate_compositions(n):
        p = composition_probability(Q, c)
        sd = sqrt(N * float(p) * (1 - float(p)))
        dev = abs(counts.get(c, 0) - N * p)
        rows.append((_arr(c), counts.get(c, 0), format_fraction(p), f"{N * float(p):.3f}",
                     f"{sd:.3f}", dev <= 3 * sd if sd else dev == 0))
    out.table(["composition", "count", "exact", "expected", "sd", "within_3sd"], rows)
    return EXIT_OK


def cmd_paintbox(args, out: Output) -> int:
    spec = resolve_model(args)
    if spec.kind != "paintbox":
        raise ValidationError("paintbox needs --paintbox or a paintbox --model")
    n = args.n
    if n is None:
        raise ValidationError("--n is required")
    total = laplace_exponent(spec.payload, n)
    rows = []
    for r in range(1, n + 1):
        phi = phi_nr(spec.payload, n, r)
        rows.append((r, format_fraction(phi), format_fraction(phi / total), out.dec(phi / total)))
    rows.append(("Phi", format_fraction(total), "1", out.dec(1)))
    out.table(["r", "phi", "q", "decimal"], rows)
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=12, help="decimal places in display columns")
    common.add_argument("--limit", type=int,
                        help="raise every enumeration cap to this value (cost grows exponentially)")

    parser = argparse.ArgumentParser(prog="regenstruct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, model_required=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        _model_args(p, model_required)
        p.set_defaults(func=fn)
        return p

    p = add("eppf", cmd_eppf, "partition probabilities at level n")
    p.add_argument("--n", type=int)
    p.add_argument("--format", choices=("csv", "json", "pfile"), default="csv")
    p.add_argument("--all", action="store_true", help="also list zero-probability partitions")

    p = add("kernel", cmd_kernel, "deletion kernel table, or q from p and a kernel", model_required=False)
    p.add_argument("--kernel", required=True, help='"tau=1/2", "size-biased", "uniform", "cosize" or JSON')
    p.add_argument("--n", type=int)
    p.add_argument("--partition", help="restrict to one partition, e.g. 2,1")

    p = add("decrement", cmd_decrement, "decrement matrix rows 1..n")
    p.add_argument("--n", type=int)
    p.add_argument("--json", action="store_true")

    p = add("project", cmd_project, "hypergeometric projection of the level-n row")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)

    p = add("regen-check", cmd_regen_check, "decide regenerativity of a partition structure")
    p.add_argument("--n", type=int)
    p.add_argument("--kernel", help="also report the regeneration residual for this kernel")

    p = add("chain", cmd_chain, "q(n,.)-chain: exact stationary law or simulation")
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=("stationary", "simulate"), default="stationary")
    p.add_argument("--kind", choices=("composition", "partition", "fragperm"), default="composition")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=1_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("sample", cmd_sample, "draw compositions")
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("residual", "paintbox"), default="residual")
    p.add_argument("--frequencies", action="store_true",
                   help="print a frequency table against the exact law instead of the stream")

    p = add("paintbox", cmd_paintbox, "Phi(n, r) and q(n, r) for a Levy measure spec")
    p.add_argument("--n", type=int)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(stdout, args.digits)
    try:
        if args.limit is None:
            return args.func(args, out)
        stderr.write(f"warning: enumeration caps set to {args.limit}; "
                     "cost grows exponentially in n\n")
        with override_limits(args.limit):
            return args.func(args, out)
    except NotRegenerative as exc:
        w = exc.witness
        stderr.write(f"not regenerative: {w}\n")
        return EXIT_NO
    except UnsupportedSpec as exc:
        stderr.write(f"refused: {exc}\n")
        return EXIT_INVALID
    except (RegenError, ValueError, KeyError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
