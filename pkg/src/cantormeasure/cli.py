"""Command line front end.

Commands: analyze, hausdorff, packing, check, render.  Reports are JSON by
default (deterministic bytes for identical inputs and flags) or human text
with --text.  Exit codes are stable:

  0  success
  2  invalid configuration
  3  finite type structure not confirmed within budget
  4  weighted incidence matrix not irreducible
  5  certified search generation out of computational reach
  6  search budget exhausted (best-found value is not certified)
  7  assumptions not satisfied (override with --assume-b where sound)

The CANTORMEASURE_WORKERS environment variable is accepted as a worker-count
hint; results never depend on it (the search is deterministic).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import density as density_mod
from .density import (
    AssumptionAViolated,
    BudgetExhausted,
    DensityError,
    InfeasibleThreshold,
    IslandTree,
    boundary_densities,
    compute_dmax,
    compute_dmin,
)
from .generation import FrameTooLarge, build_frames
from .ifs import MODE_RELAXED_B, SpecError, parse_spec_file
from .measure import NotIrreducibleError, build_measure_model
from .numerics import DEFAULT_PRECISION, PrecisionExhausted, set_precision
from .overlap import (
    GFTCNotConfirmed,
    check_irreducible,
    classify_types,
    incidence_template,
)
from .render import render_svg
from .report import (
    assumptions_json,
    base_report,
    boundary_json,
    density_json,
    dumps,
    render_text,
)
from .verify import B_VERIFIED, assumption_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GFTC = 3
EXIT_REDUCIBLE = 4
EXIT_INFEASIBLE = 5
EXIT_BUDGET = 6
EXIT_ASSUMPTIONS = 7


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


class Pipeline:
    """parse -> classify -> template -> irreducibility -> model -> assumptions."""

    def __init__(self, config_path: str, args):
        self.timings: dict[str, float] = {}
        t0 = time.perf_counter()
        self.spec = parse_spec_file(config_path)
        self.timings["parse"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        self.table = classify_types(self.spec, max_generations=args.max_classify)
        self.timings["classify"] = time.perf_counter() - t0

        self.template = incidence_template(self.table)
        self.irreducible = check_irreducible(self.template)
        if not self.irreducible:
            raise NotIrreducibleError("weighted incidence matrix is not irreducible")

        t0 = time.perf_counter()
        self.model = build_measure_model(self.spec, self.table, self.template)
        self.timings["dimension"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        self.assumptions = assumption_report(self.model, depth=args.b_depth)
        self.timings["assumptions"] = time.perf_counter() - t0
        self.tree = IslandTree(self.model)

    def report(self, command: str) -> dict:
        rep = base_report(command, self.spec, self.table, self.template, self.model)
        rep["irreducible"] = self.irreducible
        rep["assumptions"] = assumptions_json(self.assumptions)
        return rep

    def gate_density(self, args) -> None:
        if self.model.degenerate:
            return
        if self.assumptions.a_status != "holds":
            raise DensityError(
                "assumption A violated (a constitutive interval contains another); "
                "density search is undefined for this input"
            )
        if self.spec.mode != MODE_RELAXED_B and not args.assume_b:
            if self.assumptions.b_status != B_VERIFIED:
                raise DensityError(
                    f"assumption B not verified (status: {self.assumptions.b_status}); "
                    "rerun with --assume-b, or use mode 'relaxed-b' where applicable"
                )


def _emit(args, rep: dict, timings) -> None:
    if args.text:
        sys.stdout.write(render_text(rep, timings))
    else:
        sys.stdout.write(dumps(rep))


def cmd_analyze(args) -> int:
    pipe = Pipeline(args.config, args)
    rep = pipe.report("analyze")
    _emit(args, rep, pipe.timings)
    return EXIT_OK


def cmd_check(args) -> int:
    pipe = Pipeline(args.config, args)
    rep = pipe.report("check")
    rep.pop("perron", None)
    _emit(args, rep, pipe.timings)
    return EXIT_OK


def _density_command(args, what: str) -> int:
    pipe = Pipeline(args.config, args)
    pipe.gate_density(args)
    rep = pipe.report(what)
    t0 = time.perf_counter()
    bnd = boundary_densities(pipe.model, pipe.tree) if not pipe.model.degenerate else None
    if bnd is not None:
        rep["boundary"] = boundary_json(bnd)
    if what == "hausdorff":
        ext = compute_dmax(
            pipe.model,
            tree=pipe.tree,
            boundaries=bnd,
            search_island_cap=args.max_islands,
            max_generation=args.max_generation,
            budget_seconds=args.budget,
        )
        rep["d_max"] = density_json(ext, "hausdorff")
    else:
        ext = compute_dmin(pipe.model, tree=pipe.tree, boundaries=bnd)
        rep["d_min"] = density_json(ext, "packing")
    pipe.timings["density"] = time.perf_counter() - t0
    _emit(args, rep, pipe.timings)
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    return _density_command(args, "hausdorff")


def cmd_packing(args) -> int:
    return _density_command(args, "packing")


def cmd_render(args) -> int:
    pipe = Pipeline(args.config, args)
    frames = build_frames(pipe.spec, args.levels, _cache=pipe.table.frames)
    svg = render_svg(pipe.table, frames[: args.levels + 1])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantormeasure",
        description=(
            "Exact dimension, Hausdorff measure and packing measure of linear "
            "self-similar sets with overlaps (finite type structure on [0,1])."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--json", dest="text", action="store_false", default=False,
                       help="JSON report on stdout (default)")
        p.add_argument("--text", dest="text", action="store_true",
                       help="human-readable report instead of JSON")
        p.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION,
                       help="working mantissa in bits (default %(default)s)")
        p.add_argument("--max-classify", type=int, default=12,
                       help="generation budget for type classification")
        p.add_argument("--b-depth", type=int, default=8,
                       help="generation depth for the edge-identity check")

    p = sub.add_parser("analyze", help="dimension pipeline without density search")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="validate config, types and assumptions")
    common(p)
    p.set_defaults(func=cmd_check)

    for name, help_text in (
        ("hausdorff", "maximal density and exact Hausdorff measure"),
        ("packing", "minimal centered density and exact packing measure"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--max-generation", type=int, default=None,
                       help="cap on the certified search generation")
        p.add_argument("--budget", type=float, default=300.0,
                       help="search wall-clock budget in seconds")
        p.add_argument("--assume-b", action="store_true",
                       help="proceed although the edge identity was not verified")
        p.add_argument("--max-islands", type=int,
                       default=density_mod.DEFAULT_SEARCH_ISLAND_CAP,
                       help="island-count cap for the search generation")
        p.set_defaults(func=cmd_hausdorff if name == "hausdorff" else cmd_packing)

    p = sub.add_parser("render", help="SVG diagram of island generations")
    common(p)
    p.add_argument("--levels", type=int, default=5, help="generations to draw")
    p.add_argument("--out", default="islands.svg", help="output SVG path")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = os.environ.get("CANTORMEASURE_WORKERS")
    if workers is not None:
        try:
            if int(workers) < 1:
                raise ValueError
        except ValueError:
            return _fail(EXIT_CONFIG, f"invalid CANTORMEASURE_WORKERS: {workers!r}")
    if args.precision_bits < 64:
        return _fail(EXIT_CONFIG, "precision must be at least 64 bits")
    set_precision(args.precision_bits)
    try:
        return args.func(args)
    except (SpecError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except (GFTCNotConfirmed, FrameTooLarge) as exc:
        return _fail(EXIT_GFTC, str(exc))
    except NotIrreducibleError as exc:
        return _fail(EXIT_REDUCIBLE, str(exc))
    except InfeasibleThreshold as exc:
        return _fail(EXIT_INFEASIBLE, str(exc))
    except BudgetExhausted as exc:
        return _fail(EXIT_BUDGET, str(exc))
    except (AssumptionAViolated, DensityError) as exc:
        return _fail(EXIT_ASSUMPTIONS, str(exc))
    except PrecisionExhausted as exc:
        return _fail(EXIT_ASSUMPTIONS, f"undecidable at precision cap: {exc}")


if __name__ == "__main__":
    sys.exit(main())
