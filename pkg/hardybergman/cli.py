"""Command-line front end.

    python -m hardybergman.cli kernel --space atomic --a 2 --rho 1 --z 1,0 --w 1,0
    python -m hardybergman.cli zeroset --seq arith:1 --count 10000 --Rmax 1000
    python -m hardybergman.cli pathology projection --p 4 --N 40 --csv terms.csv

Every command prints one JSON report on standard output. The exit status is 0 on
success, 1 when a numeric error ends the command (the report carries its category) and
2 on usage errors. Complex values are written `re,im`.
"""

import argparse
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Callable

import attrs
import numpy as np
import regex

from hardybergman import __version__
from hardybergman.errors import BASE_OPTIONS, NumericError, NumericWarning
from hardybergman.kernels import (
    AtomicKernel,
    BergmanKernel,
    HardyKernel,
    ZenKernel,
    kernel_M,
    kernel_value,
)
from hardybergman.measures import AtomicParams, BoundaryMeasure, check_doubling
from hardybergman.pathology import (
    EXPONENT_LIMIT,
    bad_point_subsequence,
    counterexample2_fk,
    counterexample2_limit,
    counterexample2_mean_value_witness,
    counterexample2_norm,
    counterexample_fk_displayed_norm,
    counterexample_fk_growth,
    counterexample_fk_line_norm,
    counterexample_fk_norm,
    projection_partial_sums,
)
from hardybergman.quadrature import QuadratureConfig
from hardybergman.report import DEFAULT_DIGITS, Report, Series, emit_csv, render_json
from hardybergman.spectral import (
    HalfLineFunction,
    LineSamples,
    SampledFunction,
    SpectralFunction,
    inner_M,
    kernel_grid,
    kernel_spectral_function,
    mellin_inverse_line,
    mellin_to_spectral,
    mellin_transform,
    norm_halfline_weighted,
    norm_M_lines,
    norm_M_spectral,
    norm_zen,
    norm_zen_lines,
    pw_synthesize,
)
from hardybergman.zerosets import PointSequence, carleman_ratio, classify

__all__ = ["run", "main", "build_parser"]

COMPLEX_LITERAL = regex.compile(r"^\s*(?P<re>[^,\s]+)\s*(?:,\s*(?P<im>[^,\s]+)\s*)?$")
GENERATOR_LITERAL = regex.compile(r"^(?P<kind>arith|geom):(?P<value>[^:]+)$")
NEGATIVE_VALUE = regex.compile(r"^-(?:\d|\.\d|inf)")
ROW_SEPARATOR = regex.compile(r"[,;\s]+")

OUTPUT_FLAGS = ("digits", "metadata", "csv")
QUADRATURE_FIELDS = attrs.fields_dict(QuadratureConfig)

Outcome = tuple[dict, Series | None]


class UsageError(Exception):
    """Inputs that parse but cannot be used."""


# Literals


def complex_literal(text: str) -> complex:
    m = COMPLEX_LITERAL.match(text)
    try:
        if m is None:
            raise ValueError
        return complex(float(m["re"]), float(m["im"] or 0.0))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a complex number as re,im, got {text!r}"
        ) from None


def _relative_difference(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y)) if x or y else 0.0


def _read_document(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise UsageError(f"{path}: {e}") from e


def load_measure(path: str) -> BoundaryMeasure:
    document = _read_document(path)
    try:
        return BoundaryMeasure.from_mapping(document)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: not a measure document: {e}") from e


def load_function(path: str, cls: type[SampledFunction]) -> SampledFunction:
    document = _read_document(path)
    try:
        real = np.asarray(document["re"], dtype=float)
        imag = np.asarray(document.get("im", 0.0), dtype=float)
        samples = real + 1j * imag
        return cls(document["grid"], samples)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: not a function document: {e}") from e


def load_sequence(source: str, count: int | None) -> PointSequence:
    """`arith:step` or `geom:base` with a count, or a file of (re, im) rows."""
    if m := GENERATOR_LITERAL.match(source):
        if count is None:
            raise UsageError(f"generator {source!r} needs --count")
        try:
            value = float(m["value"])
        except ValueError:
            raise UsageError(f"bad generator parameter in {source!r}") from None
        if m["kind"] == "arith":
            return PointSequence.arithmetic(value, count)
        return PointSequence.geometric(value, count)
    try:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise UsageError(f"{source}: {e.strerror or e}") from e
    rows = []
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = ROW_SEPARATOR.split(line)
        try:
            if len(fields) != 2:
                raise ValueError
            rows.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise UsageError(
                f"{source}:{number}: expected two columns re, im, got {line!r}"
            ) from None
    return PointSequence.from_rows(rows)


def attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite `--flag -1,0` as `--flag=-1,0` so argparse keeps it as a value."""
    result = []
    for token in argv:
        if (
            result
            and NEGATIVE_VALUE.match(token)
            and result[-1].startswith("--")
            and "=" not in result[-1]
        ):
            result[-1] = f"{result[-1]}={token}"
        else:
            result.append(token)
    return result


# Commands


def _params(args) -> AtomicParams:
    return AtomicParams(args.a, args.rho)


def _quadrature(args) -> QuadratureConfig:
    return QuadratureConfig(**{name: getattr(args, name) for name in QUADRATURE_FIELDS})


def cmd_kernel(args) -> Outcome:
    spec = {
        "atomic": lambda: AtomicKernel(_params(args)),
        "hardy": HardyKernel,
        "bergman": BergmanKernel,
    }[args.space]()
    return {"value": kernel_value(spec, args.z, args.w)}, None


def cmd_zen_kernel(args) -> Outcome:
    spec = ZenKernel(load_measure(args.measure), _quadrature(args))
    return {"value": kernel_value(spec, args.z, args.w)}, None


def cmd_norm(args) -> Outcome:
    q = _quadrature(args)
    psi = load_function(args.psi, SpectralFunction)
    if args.measure is not None:
        return {"norm": norm_zen(psi, load_measure(args.measure), q)}, None
    return {"norm": norm_M_spectral(psi, _params(args), q)}, None


def cmd_pw_check(args) -> Outcome:
    if args.psi is None and (args.z is None or args.w is None):
        raise UsageError("pw-check needs --psi, or both --z and --w")
    q = _quadrature(args)
    results = {}
    if args.psi is not None:
        psi = load_function(args.psi, SpectralFunction)
        if args.measure is not None:
            m = load_measure(args.measure)
            spectral, lines = norm_zen(psi, m, q), norm_zen_lines(psi, m, q)
        else:
            p = _params(args)
            spectral, lines = norm_M_spectral(psi, p, q), norm_M_lines(psi, p, q)
        results |= {
            "norm_spectral": spectral,
            "norm_lines": lines,
            "relative_difference": _relative_difference(spectral, lines),
        }
        for i, z in enumerate(args.at or ()):
            results[f"value_{i}"] = pw_synthesize(psi, z, q)
    if args.z is not None and args.w is not None:
        p = _params(args)
        grid = kernel_grid(p)
        inner = inner_M(
            kernel_spectral_function(args.w, p, grid),
            kernel_spectral_function(args.z, p, grid),
            p,
            q,
        )
        kernel = kernel_M(args.z, args.w, p)
        results |= {
            "inner_product": inner,
            "kernel": kernel,
            "kernel_relative_difference": abs(inner - kernel) / abs(kernel),
        }
    return results, None


def cmd_mellin_check(args) -> Outcome:
    q = _quadrature(args)
    p = _params(args)
    phi = load_function(args.phi, HalfLineFunction)
    halfline = norm_halfline_weighted(phi, p, q)
    spectral = norm_M_spectral(mellin_to_spectral(phi), p, q)
    results = {
        "norm_halfline": halfline,
        "norm_spectral": spectral,
        "relative_difference": _relative_difference(halfline, spectral),
    }
    for i, z in enumerate(args.at or ()):
        results[f"transform_{i}"] = mellin_transform(phi, z, q)
    if args.xi is not None:
        psi = mellin_to_spectral(phi)
        y = np.linspace(-args.y_max, args.y_max, args.y_count)
        for c in args.c:
            f_line = LineSamples(y, pw_synthesize(psi, c + 1j * y, q))
            results[f"inverse_c{c!r}"] = mellin_inverse_line(f_line, c, args.xi, q)
    return results, None


def cmd_zeroset(args) -> Outcome:
    s = load_sequence(args.seq, args.count)
    report = classify(
        s,
        args.Rmax,
        rho_tolerance=args.rho_tolerance,
        carleman_margin=args.carleman_margin,
        window=args.window,
        samples=args.samples,
    )
    results = {
        "points": len(s),
        "rho1_estimate": report.rho1_estimate,
        "d_plus": report.d_plus,
        "d_minus": report.d_minus,
        "carleman_ratio": carleman_ratio(s, args.Rmax),
        "carleman_trend": report.carleman_trend,
        "eps0": report.eps0,
        "verdict": report.verdict,
        "threshold": report.threshold,
        "threshold_space": report.threshold_space,
    }
    return results, Series(["R", "ratio"], report.carleman_samples)


def cmd_doubling(args) -> Outcome:
    if not 0 < args.t_min < args.t_max:
        raise UsageError(
            f"need 0 < --t-min < --t-max, got {args.t_min!r}, {args.t_max!r}"
        )
    t = np.geomspace(args.t_min, args.t_max, args.t_count)
    report = check_doubling(load_measure(args.measure), t, args.R)
    results = {
        "sup_estimate": report.sup_estimate,
        "bound": report.bound,
        "passed": report.passed,
    }
    return results, Series(["t", "ratio"], report.ratio_samples)


def cmd_projection(args) -> Outcome:
    series = projection_partial_sums(
        args.p, _params(args), args.w, args.N, _quadrature(args)
    )
    log_sum = series.partial_sums_log[-1]
    results = {
        "verdict": series.verdict,
        "log_partial_sum": log_sum,
        "partial_sum": math.exp(log_sum) if log_sum < EXPONENT_LIMIT else math.inf,
    }
    rows = [
        (n, term, partial)
        for (n, term), partial in zip(series.terms, series.partial_sums_log)
    ]
    return results, Series(["n", "log_term", "log_partial_sum"], rows)


def cmd_fk_norm(args) -> Outcome:
    q = _quadrature(args)
    weights = [
        math.exp(AtomicParams(2, 1).log_atom_weight(n)) for n in range(args.N + 1)
    ]
    rows = []
    for k in args.k:
        exact = sum(
            weight * counterexample_fk_line_norm(k, n)
            for n, weight in enumerate(weights)
        )
        direct = counterexample_fk_norm(k, args.N, q)
        rows.append((k, direct, exact, counterexample_fk_displayed_norm(k, args.N)))
    norms = [row[1] for row in rows]
    results = {"strictly_decreasing": all(b < a for a, b in zip(norms, norms[1:]))}
    columns = ["k", "norm_squared", "line_closed_form", "displayed_closed_form"]
    return results, Series(columns, rows)


def cmd_fk_growth(args) -> Outcome:
    l0, _ = bad_point_subsequence(args.p, args.q, args.count)
    growth = counterexample_fk_growth(args.p, args.q, args.y, args.count)
    values = [value for _, value in growth]
    results = {
        "l0": l0,
        "z": complex(args.p / args.q, args.y),
        "monotone": all(b > a for a, b in zip(values, values[1:])),
    }
    return results, Series(["k", "log_modulus"], growth)


def cmd_limit(args) -> Outcome:
    q = _quadrature(args)
    limit = counterexample2_limit(args.z)
    rows = []
    for k in range(1, args.k_max + 1):
        defect = float(abs(counterexample2_fk(k, args.z) - limit))
        rows.append((k, defect, counterexample2_norm(k, args.N, q)))
    results = {
        "limit": complex(limit),
        "mean_value_defect": counterexample2_mean_value_witness(
            args.center, args.radius, args.samples
        ),
    }
    return results, Series(["k", "defect", "norm_squared"], rows)


# Parser


def _add_quadrature_flags(p: argparse.ArgumentParser):
    group = p.add_argument_group("quadrature")
    group.add_argument(
        "--target-rel-error",
        type=float,
        default=QUADRATURE_FIELDS["target_rel_error"].default,
    )
    group.add_argument(
        "--max-refinements",
        type=int,
        default=QUADRATURE_FIELDS["max_refinements"].default,
    )
    group.add_argument(
        "--line-truncation-Y",
        dest="line_truncation_Y",
        type=float,
        default=QUADRATURE_FIELDS["line_truncation_Y"].default,
    )
    group.add_argument(
        "--series-truncation-N",
        dest="series_truncation_N",
        type=int,
        default=QUADRATURE_FIELDS["series_truncation_N"].default,
    )
    group.add_argument("--order", type=int, default=QUADRATURE_FIELDS["order"].default)
    group.add_argument(
        "--tail-correction",
        action=argparse.BooleanOptionalAction,
        default=QUADRATURE_FIELDS["tail_correction"].default,
    )
    group.add_argument(
        "--on-truncation",
        choices=sorted(BASE_OPTIONS),
        default=QUADRATURE_FIELDS["on_truncation"].default,
    )


def _add_params_flags(p: argparse.ArgumentParser):
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--rho", type=float, default=1.0)


def _add_output_flags(p: argparse.ArgumentParser):
    group = p.add_argument_group("output")
    group.add_argument(
        "--digits",
        type=int,
        default=DEFAULT_DIGITS,
        help="significant digits in the report",
    )
    group.add_argument(
        "--metadata", action="store_true", help="add the package version to the report"
    )
    group.add_argument(
        "--csv", metavar="PATH", help="write the command's series as CSV"
    )


def _subcommand(
    subparsers,
    name: str,
    handler: Callable[..., Outcome],
    command: str | None = None,
    **kwargs,
) -> argparse.ArgumentParser:
    p = subparsers.add_parser(name, **kwargs)
    p.set_defaults(handler=handler, command=command or name)
    _add_output_flags(p)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardybergman", description="Hardy-Bergman space computations"
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    p = _subcommand(
        commands, "kernel", cmd_kernel, help="closed-form reproducing kernels"
    )
    p.add_argument("--space", choices=["atomic", "hardy", "bergman"], default="atomic")
    _add_params_flags(p)
    p.add_argument("--z", type=complex_literal, required=True)
    p.add_argument("--w", type=complex_literal, required=True)

    p = _subcommand(
        commands, "zen-kernel", cmd_zen_kernel, help="Zen kernel of a boundary measure"
    )
    p.add_argument("--measure", required=True, help="JSON measure document")
    p.add_argument("--z", type=complex_literal, required=True)
    p.add_argument("--w", type=complex_literal, required=True)
    _add_quadrature_flags(p)

    p = _subcommand(commands, "norm", cmd_norm, help="spectral-side norm of a function")
    p.add_argument("--psi", required=True, help="JSON function document")
    p.add_argument(
        "--measure", help="JSON measure document; the Zen norm is computed when given"
    )
    _add_params_flags(p)
    _add_quadrature_flags(p)

    p = _subcommand(
        commands,
        "pw-check",
        cmd_pw_check,
        help="Paley-Wiener isometry and reproducing identity",
    )
    p.add_argument("--psi", help="JSON function document")
    p.add_argument(
        "--measure", help="JSON measure document; checks the Zen isometry when given"
    )
    p.add_argument(
        "--at",
        type=complex_literal,
        action="append",
        help="synthesis point, repeatable",
    )
    p.add_argument("--z", type=complex_literal)
    p.add_argument("--w", type=complex_literal)
    _add_params_flags(p)
    _add_quadrature_flags(p)

    p = _subcommand(
        commands, "mellin-check", cmd_mellin_check, help="Mellin isometry and inversion"
    )
    p.add_argument("--phi", required=True, help="JSON half-line function document")
    p.add_argument(
        "--at",
        type=complex_literal,
        action="append",
        help="transform point, repeatable",
    )
    p.add_argument(
        "--xi",
        type=float,
        help="inversion point; samples the transform on each line Re z = c",
    )
    p.add_argument("--c", type=float, action="append", default=None)
    p.add_argument("--y-max", type=float, default=5000.0)
    p.add_argument("--y-count", type=int, default=500001)
    _add_params_flags(p)
    _add_quadrature_flags(p)

    p = _subcommand(
        commands, "zeroset", cmd_zeroset, help="zero-set analytics of a point sequence"
    )
    p.add_argument(
        "--seq", required=True, help="arith:STEP, geom:BASE or a file of re, im rows"
    )
    p.add_argument("--count", type=int)
    p.add_argument("--Rmax", type=float, required=True)
    p.add_argument("--rho-tolerance", type=float, default=0.05)
    p.add_argument("--carleman-margin", type=float, default=0.05)
    p.add_argument("--window", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=256)

    p = _subcommand(
        commands, "doubling", cmd_doubling, help="doubling ratios of a boundary measure"
    )
    p.add_argument("--measure", required=True, help="JSON measure document")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--t-min", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("--t-count", type=int, default=61)

    pathology = commands.add_parser("pathology", help="negative results")
    pathology = pathology.add_subparsers(dest="pathology_command", required=True)

    p = _subcommand(
        pathology,
        "projection",
        cmd_projection,
        "pathology projection",
        help="projection series of the kernel in L^p",
    )
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--w", type=complex_literal, default=1 + 0j)
    p.add_argument("--N", type=int, default=60)
    _add_params_flags(p)
    _add_quadrature_flags(p)

    p = _subcommand(
        pathology,
        "fk-norm",
        cmd_fk_norm,
        "pathology fk-norm",
        help="norms of the first counterexample family",
    )
    p.add_argument("--k", type=int, action="append", default=None)
    p.add_argument("--N", type=int, default=40)
    _add_quadrature_flags(p)

    p = _subcommand(
        pathology,
        "fk-growth",
        cmd_fk_growth,
        "pathology fk-growth",
        help="blow-up at a point below the real axis",
    )
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--y", type=float, default=-0.5)
    p.add_argument("--count", type=int, default=6)

    p = _subcommand(
        pathology,
        "limit",
        cmd_limit,
        "pathology limit",
        help="the second family and its non-holomorphic limit",
    )
    p.add_argument("--z", type=complex_literal, default=0.1j)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--center", type=float, default=0.25)
    p.add_argument("--radius", type=float, default=0.2)
    p.add_argument("--samples", type=int, default=256)
    _add_quadrature_flags(p)

    return parser


def _fill_list_defaults(args):
    # argparse appends to a list default instead of replacing it.
    if getattr(args, "k", ...) is None:
        args.k = [1, 2, 4, 8, 16]
    if getattr(args, "c", ...) is None:
        args.c = [1.0, 2.0]


def _inputs(args) -> dict:
    hidden = {"handler", "subcommand", "pathology_command", "command", *OUTPUT_FLAGS}
    return {
        name: value for name, value in sorted(vars(args).items()) if name not in hidden
    }


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(
        attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    )
    _fill_list_defaults(args)
    inputs = _inputs(args)
    metadata = {"version": __version__} if args.metadata else None

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericWarning)
        try:
            results, series = args.handler(args)
            if args.csv is not None and series is not None:
                emit_csv(series, args.csv)
        except NumericError as e:
            notes = [
                str(w.message) for w in caught if issubclass(w.category, NumericWarning)
            ]
            report = attrs.evolve(
                Report.failure(args.command, inputs, e, notes), metadata=metadata
            )
            stdout.write(render_json(report, args.digits))
            return 1
        except (UsageError, ValueError) as e:
            parser.exit(2, f"{parser.prog} {args.command}: error: {e}\n")

    notes = [str(w.message) for w in caught if issubclass(w.category, NumericWarning)]
    report = Report(
        command=args.command,
        inputs=inputs,
        results=results,
        series=series,
        warnings=notes,
        metadata=metadata,
    )
    stdout.write(render_json(report, args.digits))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
