"""Command-line interface: zeta, bundle, dihedral, and tower pipelines.

Every report file embeds a manifest (subcommand, input digests, flags,
seed, version) and is byte-deterministic for a fixed manifest; wall time
is only recorded with --timing since it would break reproducibility.

Exit codes: 0 success, 2 input validation, 3 resource limit, 4 numeric
non-convergence.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .bundles import (
    Permutation,
    build_bundle,
    cover_to_bundle,
    decomposed_adjacency,
    voltage_assignment,
    voltage_from_json,
    voltage_to_json,
)
from .dihedral import (
    build_dihedral_setup,
    conjugation_residual,
    dihedral_element,
    dihedral_factorization,
    dihedral_zeta_factors,
)
from .graphs import (
    CoveringMap,
    GraphAutomorphism,
    ResourceLimitError,
    ValidationError,
    adjacency_matrix,
    graph_from_json,
    graph_to_json,
    load_graph,
)
from .quadrature import NonConvergenceError
from .towers import (
    GRIGORCHUK,
    certify_strong_convergence,
    cycle_tower,
    grigorchuk_log_zeta,
    normalized_log_zeta,
    schreier_tower,
)
from .zeta import (
    evaluate_zeta_inverse,
    log_zeta_series,
    oracle_length_counts,
    primitive_cycle_oracle,
    zeta_inverse,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_NONCONVERGENCE = 4


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _manifest(
    subcommand: str,
    inputs: list[str],
    flags: dict,
    seed: Optional[int],
    timing: bool,
    started: float,
) -> dict:
    out = {
        "subcommand": subcommand,
        "inputs": {path: _digest(path) for path in sorted(inputs)},
        "flags": flags,
        "seed": seed,
        "version": __version__,
    }
    if timing:
        out["wall_time_s"] = round(time.monotonic() - started, 3)
    return out


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fraction_str(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# zeta

def cmd_zeta(args: argparse.Namespace) -> int:
    started = time.monotonic()
    g = load_graph(args.graph)
    zr = zeta_inverse(g)
    report: dict = {
        "hashimoto_det": list(zr.hashimoto_det.coeffs),
        "bass_det": list(zr.bass_det.coeffs),
        "bass_exponent": zr.bass_exponent,
        "valid_radius": _fraction_str(zr.valid_radius),
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "darts": g.num_darts,
    }
    flags: dict = {}
    if args.series_order:
        flags["series_order"] = args.series_order
        series = log_zeta_series(g, args.series_order)
        report["N"] = [int(r * series[r]) for r in range(1, args.series_order + 1)]
        report["log_zeta_series"] = [_fraction_str(c) for c in series]
    if args.oracle_max_len:
        flags["oracle_max_len"] = args.oracle_max_len
        classes = primitive_cycle_oracle(g, args.oracle_max_len)
        counts = oracle_length_counts(classes)
        report["oracle_class_counts"] = {str(k): v for k, v in sorted(counts.items())}
        if args.series_order:
            ok = True
            for r in range(1, min(args.series_order, args.oracle_max_len) + 1):
                total = sum(d * counts.get(d, 0) for d in range(1, r + 1) if r % d == 0)
                if total != report["N"][r - 1]:
                    ok = False
            report["oracle_consistent"] = ok
    if args.eval is not None:
        z = complex(args.eval[0], args.eval[1])
        val = evaluate_zeta_inverse(zr, z)
        flags["eval"] = [args.eval[0], args.eval[1]]
        report["eval"] = {
            "z": [z.real, z.imag],
            "value": [val.value.real, val.value.imag],
            "in_valid_region": val.in_valid_region,
        }
    report["manifest"] = _manifest(
        "zeta", [args.graph], flags, None, args.timing, started
    )
    _write_json(args.output, report)
    print(
        f"zeta: {g.vertex_count} vertices, {g.edge_count} edges; "
        f"det degree {zr.hashimoto_det.degree}; report -> {args.output}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# bundle

def _covering_from_json(obj: dict) -> CoveringMap:
    return CoveringMap(
        graph_from_json(obj["source"]),
        graph_from_json(obj["target"]),
        tuple(obj["vertex_map"]),
        tuple(obj["dart_map"]),
    )


def cmd_bundle(args: argparse.Namespace) -> int:
    started = time.monotonic()
    inputs: list[str] = []
    flags = {"mode": args.mode}
    report: dict = {}
    if args.mode in ("build", "decompose-check"):
        if not args.voltages:
            raise ValidationError("--voltages required for this mode")
        inputs.append(args.voltages)
        with open(args.voltages) as fh:
            va = voltage_from_json(json.load(fh))
        bundle = build_bundle(va)
        report["total_vertices"] = bundle.total.vertex_count
        report["total_edges"] = bundle.total.edge_count
        if args.mode == "build":
            report["total"] = graph_to_json(bundle.total)
        else:
            dev = int(
                np.max(np.abs(decomposed_adjacency(va) - adjacency_matrix(bundle.total)))
            )
            report["max_entry_deviation"] = dev
            report["decomposition_exact"] = dev == 0
    else:  # cover-to-bundle
        if not (args.cover and args.deck):
            raise ValidationError("--cover and --deck required for this mode")
        inputs.extend([args.cover, args.deck])
        with open(args.cover) as fh:
            p = _covering_from_json(json.load(fh))
        with open(args.deck) as fh:
            deck_obj = json.load(fh)
        gens = [
            GraphAutomorphism(p.source, tuple(gen["vertex_perm"]), tuple(gen["dart_perm"]))
            for gen in deck_obj["generators"]
        ]
        result = cover_to_bundle(p, gens)
        report["deck_order"] = len(result.elements)
        report["voltage"] = voltage_to_json(result.voltage)
        report["iso_vertices"] = list(result.iso_vertices)
        if args.zeta_check:
            zs = zeta_inverse(p.source)
            zt = zeta_inverse(result.bundle.total)
            report["zeta_match"] = zs.hashimoto_det == zt.hashimoto_det
    report["manifest"] = _manifest("bundle", inputs, flags, None, args.timing, started)
    _write_json(args.output, report)
    print(f"bundle[{args.mode}]: report -> {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# dihedral

def cmd_dihedral(args: argparse.Namespace) -> int:
    started = time.monotonic()
    base = load_graph(args.base)
    n = args.fiber_circulant[0]
    conns = {int(s) for s in args.fiber_circulant[1].split(",")}
    setup = build_dihedral_setup(n, conns)
    inputs = [args.base]
    if args.voltages:
        inputs.append(args.voltages)
        with open(args.voltages) as fh:
            va = voltage_from_json(json.load(fh))
        if va.base != base or va.fiber != setup.fiber:
            raise ValidationError("voltage file does not match base/fiber")
    else:
        rng = random.Random(args.seed)
        per = {}
        for d in range(base.num_darts):
            if d < base.involution[d] or base.involution[d] == d:
                per[d] = dihedral_element(setup, rng.randrange(n), rng.randrange(2))
        va = voltage_assignment(base, setup.fiber, per)
    fact = dihedral_factorization(setup, va)
    residual = conjugation_residual(fact)
    zr = zeta_inverse(build_bundle(va).total)
    rng = random.Random(args.seed + 1)
    k_plus_d = base.max_degree + setup.fiber_degree
    samples = []
    worst = 0.0
    for _ in range(args.samples):
        r = rng.uniform(0.05, 0.95) / (k_plus_d - 1)
        theta = rng.uniform(0.0, 2.0 * cmath.pi)
        z = r * cmath.exp(1j * theta)
        fac = dihedral_zeta_factors(fact, z)
        exact = evaluate_zeta_inverse(zr, z).value
        err = abs(fac.assembled - exact)
        worst = max(worst, err)
        samples.append(
            {
                "z": [z.real, z.imag],
                "assembled": [fac.assembled.real, fac.assembled.imag],
                "exact": [exact.real, exact.imag],
                "abs_error": err,
            }
        )
    report = {
        "n": n,
        "connection_set": sorted(conns),
        "conjugation_residual": residual,
        "samples": samples,
        "max_abs_error": worst,
        "within_tolerance": worst < args.tolerance,
        "manifest": _manifest(
            "dihedral",
            inputs,
            {
                "fiber_circulant": [n, sorted(conns)],
                "samples": args.samples,
                "tolerance": args.tolerance,
            },
            args.seed,
            args.timing,
            started,
        ),
    }
    _write_json(args.output, report)
    print(
        f"dihedral: n={n}, conjugation residual {residual:.2e}, "
        f"max |assembled - exact| = {worst:.2e} over {args.samples} samples "
        f"-> {args.output}"
    )
    return EXIT_OK if worst < args.tolerance else EXIT_NONCONVERGENCE


# ---------------------------------------------------------------------------
# tower

def cmd_tower(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.preset == "grigorchuk":
        tower = schreier_tower(GRIGORCHUK, depth=args.depth, doubled=args.doubled)
    else:
        tower = cycle_tower(args.depth)
    cert = certify_strong_convergence(tower)
    zs = [complex(z) for z in args.z]
    series = normalized_log_zeta(tower, args.series_order, zs)
    report: dict = {
        "preset": args.preset,
        "depth": args.depth,
        "doubled": args.doubled,
        "series_order": args.series_order,
        "certified": cert.ok,
        "certified_radii": [lc.certified_radius for lc in cert.levels],
        "levels": [
            {
                "level": i + 1,
                "vertices": series.level_sizes[i],
                "values": [[v.real, v.imag] for v in series.values[i]],
            }
            for i in range(len(series.level_sizes))
        ],
        "limit_estimate": [[v.real, v.imag] for v in series.limit_estimate],
        "error_bar": list(series.error_bar),
    }
    if args.preset == "grigorchuk" and args.doubled:
        closed = [grigorchuk_log_zeta(z) for z in zs]
        report["closed_form_log"] = [[c.value.real, c.value.imag] for c in closed]
        report["closed_form_deviation"] = [
            abs(series.values[-1][i] - closed[i].value) for i in range(len(zs))
        ]
        if args.integrand_raw:
            raw = [grigorchuk_log_zeta(z, raw_integrand=True) for z in zs]
            report["closed_form_raw"] = [[c.value.real, c.value.imag] for c in raw]
            report["closed_form_raw_deviation"] = [
                abs(series.values[-1][i] - raw[i].value) for i in range(len(zs))
            ]
    flags = {
        "preset": args.preset,
        "depth": args.depth,
        "doubled": args.doubled,
        "series_order": args.series_order,
        "z": [[z.real, z.imag] for z in zs],
        "emit": args.emit,
    }
    report["manifest"] = _manifest("tower", [], flags, None, args.timing, started)
    if args.emit == "json":
        _write_json(args.output, report)
        outputs = [args.output]
    else:
        outputs = []
        stem = args.output.rsplit(".", 1)[0]
        for i, z in enumerate(zs):
            path = f"{stem}_z{i}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["level", "vertices", "value_re", "value_im", "diff_prev", "certified_radius"]
                )
                for lvl in range(len(series.level_sizes)):
                    diff = "" if lvl == 0 else repr(series.diffs[lvl - 1][i])
                    writer.writerow(
                        [
                            lvl + 1,
                            series.level_sizes[lvl],
                            repr(series.values[lvl][i].real),
                            repr(series.values[lvl][i].imag),
                            diff,
                            cert.levels[lvl].certified_radius,
                        ]
                    )
            outputs.append(path)
    print(
        f"tower[{args.preset}]: depth {args.depth}, certified={cert.ok}; "
        f"outputs -> {', '.join(outputs)}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphzeta",
        description="Ihara zeta functions, graph bundles, and covering towers.",
    )
    parser.add_argument("--timing", action="store_true", help="record wall time in the manifest")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeta", help="exact reciprocal zeta of a graph")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--series-order", type=int, default=0, metavar="R")
    p.add_argument("--oracle-max-len", type=int, default=0, metavar="L")
    p.add_argument("--eval", type=float, nargs=2, metavar=("RE", "IM"))
    p.add_argument("-o", "--output", default="zeta_report.json")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("bundle", help="voltage bundles and cover reconstruction")
    p.add_argument(
        "--mode",
        choices=["build", "decompose-check", "cover-to-bundle"],
        default="build",
    )
    p.add_argument("--voltages", help="voltage JSON file")
    p.add_argument("--cover", help="covering map JSON file")
    p.add_argument("--deck", help="deck generators JSON file")
    p.add_argument("--zeta-check", action="store_true")
    p.add_argument("-o", "--output", default="bundle_report.json")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("dihedral", help="dihedral block factorization check")
    p.add_argument("--base", required=True, help="base graph JSON")
    p.add_argument(
        "--fiber-circulant",
        nargs=2,
        required=True,
        metavar=("N", "CONNECTIONS"),
        type=str,
    )
    p.add_argument("--voltages", help="voltage JSON (default: random dihedral)")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="dihedral_report.json")
    p.set_defaults(func=cmd_dihedral)

    p = sub.add_parser("tower", help="covering towers and normalized log zeta")
    p.add_argument("--preset", choices=["grigorchuk", "cycles"], default="grigorchuk")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--doubled", action="store_true", help="doubled Schreier convention")
    p.add_argument("--series-order", type=int, default=17, metavar="R")
    p.add_argument("--z", type=float, nargs="+", default=[0.05])
    p.add_argument("--emit", choices=["json", "csv"], default="json")
    p.add_argument("--integrand-raw", action="store_true")
    p.add_argument("-o", "--output", default="tower_report.json")
    p.set_defaults(func=cmd_tower)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dihedral":
        n = int(args.fiber_circulant[0])
        args.fiber_circulant = (n, args.fiber_circulant[1])
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
