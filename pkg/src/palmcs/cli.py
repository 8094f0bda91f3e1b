"""Command-line surface: solve, reconstruct, bench, coherence, noise.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
malformed inputs), 3 solver divergence.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .experiment import (
    ConfigError,
    ExperimentConfig,
    OperatorKind,
    noise_grid_from_lists,
    parse_config,
    reconstruct_image,
    rows_to_csv,
    run_experiment,
)
from .linops import as_vector
from .noise import NoiseSpec, apply_noise
from .pgm import PgmParseError, read_pgm_file, write_pgm_file
from .sensing import BasisPair, dct_matrix, mutual_coherence, operator_from_bytes
from .solver import PalmDivergenceError, PalmParams, default_params, kkt_report, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of sys.exit so cli_main controls the exit code
    def error(self, message):
        raise _UsageError(message)


def _common_flags(parser: _Parser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the seed")
    parser.add_argument("--out", default=None, help="output file or directory")
    parser.add_argument("--quiet", action="store_true", help="suppress report output")
    parser.add_argument(
        "--trace", action="store_true", help="stream per-iteration solver records to stderr"
    )


def _solver_flags(parser: _Parser) -> None:
    parser.add_argument("--mu", type=float, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--tau", type=float, default=1.0)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--max-iter", type=int, default=5000)
    parser.add_argument("--tol", type=float, default=1e-6)


def build_parser() -> _Parser:
    parser = _Parser(prog="palmcs", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="solve one measurement system")
    p_solve.add_argument("--operator", required=True, help="binary operator container")
    p_solve.add_argument(
        "--measurements", required=True, help="text file, one value per line"
    )
    _solver_flags(p_solve)
    _common_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_rec = sub.add_parser("reconstruct", help="sense and reconstruct one image")
    p_rec.add_argument("--image", required=True, help="input PGM")
    p_rec.add_argument("--ratio", type=float, default=0.5)
    p_rec.add_argument(
        "--operator",
        choices=[kind.value for kind in OperatorKind],
        default=OperatorKind.GAUSSIAN_ORTHONORMAL.value,
    )
    p_rec.add_argument("--max-iter", type=int, default=5000)
    p_rec.add_argument("--tol", type=float, default=1e-6)
    p_rec.add_argument("--mu-scale", type=float, default=1e-3)
    _common_flags(p_rec)
    p_rec.set_defaults(func=_cmd_reconstruct)

    p_bench = sub.add_parser("bench", help="run a config-file experiment grid")
    p_bench.add_argument("--config", required=True, help="flat key=value config file")
    _common_flags(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_coh = sub.add_parser("coherence", help="mutual coherence of a named basis pair")
    p_coh.add_argument(
        "--pair", required=True, help="e.g. identity:hadamard4 or dct8:identity"
    )
    _common_flags(p_coh)
    p_coh.set_defaults(func=_cmd_coherence)

    p_noise = sub.add_parser("noise", help="apply a noise model to an image")
    p_noise.add_argument("--image", required=True, help="input PGM")
    p_noise.add_argument(
        "--kind", required=True, choices=["gaussian", "salt_pepper", "speckle"]
    )
    p_noise.add_argument("--level", type=float, required=True)
    _common_flags(p_noise)
    p_noise.set_defaults(func=_cmd_noise)

    return parser


def _read_vector_file(path: str) -> np.ndarray:
    values = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"{path}: not a number: {line!r}") from None
    if not values:
        raise ValueError(f"{path}: no values found")
    return as_vector(values, "measurement vector")


def _cmd_solve(args) -> int:
    operator = operator_from_bytes(Path(args.operator).read_bytes())
    b = _read_vector_file(args.measurements)
    if args.mu is None or args.beta is None:
        params = default_params(
            operator,
            b,
            max_iter=args.max_iter,
            tol_feasibility=args.tol,
            tol_x_change=args.tol,
        )
        if args.mu is not None or args.beta is not None:
            raise _UsageError("--mu and --beta must be given together")
    else:
        params = PalmParams(
            mu=args.mu,
            beta=args.beta,
            tau=args.tau,
            gamma=args.gamma,
            max_iter=args.max_iter,
            tol_feasibility=args.tol,
            tol_x_change=args.tol,
        )
    trace = sys.stderr if args.trace else None
    result = solve(operator, b, params, trace=trace)
    solution_text = "\n".join(f"{v:.17g}" for v in result.x) + "\n"
    if args.out:
        Path(args.out).write_text(solution_text, encoding="utf-8")
    else:
        sys.stdout.write(solution_text)
    if not args.quiet:
        report = kkt_report(operator, b, result, params.mu)
        print(
            f"iterations={result.iterations} converged={result.converged} "
            f"dual_feasibility={report.dual_feasibility:.3e} "
            f"complementarity={report.complementarity:.3e} "
            f"primal_feasibility={report.primal_feasibility:.3e} "
            f"multiplier_consistency={report.multiplier_consistency:.3e}",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    image_path = Path(args.image)
    img = read_pgm_file(image_path)
    cfg = ExperimentConfig(
        image_paths=(image_path,),
        measurement_ratio=args.ratio,
        operator_kind=OperatorKind(args.operator),
        mu_scale=args.mu_scale,
        max_iter=args.max_iter,
        tol=args.tol,
        master_seed=args.seed if args.seed is not None else 0,
    )
    recon, report = reconstruct_image(img, cfg)
    out_dir = Path(args.out) if args.out else image_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{image_path.stem}__recon.pgm"
    write_pgm_file(out_path, recon)
    if not args.quiet:
        print(
            f"{image_path.name}: psnr={report.psnr_db:.4f} dB "
            f"rmse={report.rmse:.4f} solver_seconds={report.elapsed_seconds:.3f} "
            f"-> {out_path}"
        )
    return EXIT_OK


def _cmd_bench(args) -> int:
    config_path = Path(args.config)
    cfg = parse_config(
        config_path.read_text(encoding="utf-8"), base_dir=config_path.parent
    )
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
        overrides["noise_grid"] = ()  # regenerated below from the new seed
    if args.out is not None:
        overrides["output_dir"] = Path(args.out)
    if overrides:
        if "master_seed" in overrides:
            kinds = sorted({spec.kind.value for spec in cfg.noise_grid})
            levels = sorted({spec.level for spec in cfg.noise_grid})
            overrides["noise_grid"] = noise_grid_from_lists(
                kinds, levels, overrides["master_seed"]
            )
        cfg = replace(cfg, **overrides)
    rows = run_experiment(cfg)
    if not args.quiet:
        sys.stdout.write(rows_to_csv(rows))
    return EXIT_OK if all(row.status == "ok" for row in rows) else EXIT_DATA


_BASIS_NAME = re.compile(r"^([a-z_]+?)(\d*)$")


def _named_basis(name: str, size: int | None) -> np.ndarray:
    match = _BASIS_NAME.match(name.strip().lower())
    if match is None:
        raise _UsageError(f"cannot parse basis name {name!r}")
    kind, digits = match.groups()
    n = int(digits) if digits else size
    if n is None:
        raise _UsageError(f"basis {name!r} needs an explicit size, e.g. {name}8")
    if size is not None and n != size:
        raise _UsageError(f"basis sizes disagree: {n} vs {size}")
    if kind == "identity":
        return np.eye(n)
    if kind == "dct":
        return dct_matrix(n).T
    if kind == "hadamard":
        if n < 1 or n & (n - 1):
            raise _UsageError(f"hadamard size must be a power of two, got {n}")
        h = np.array([[1.0]])
        while h.shape[0] < n:
            h = np.block([[h, h], [h, -h]])
        return h / np.sqrt(n)
    raise _UsageError(f"unknown basis {kind!r} (use identity, dct, or hadamard)")


def _cmd_coherence(args) -> int:
    parts = args.pair.split(":")
    if len(parts) != 2:
        raise _UsageError("--pair must look like name[N]:name[N]")
    # resolve sizes: a named size on either side fixes the other
    sizes = []
    for part in parts:
        match = _BASIS_NAME.match(part.strip().lower())
        if match and match.group(2):
            sizes.append(int(match.group(2)))
    size = sizes[0] if sizes else None
    phi = _named_basis(parts[0], size)
    psi = _named_basis(parts[1], size if size is not None else phi.shape[0])
    value = mutual_coherence(BasisPair(phi, psi))
    print(value)
    return EXIT_OK


def _cmd_noise(args) -> int:
    img = read_pgm_file(args.image)
    spec = NoiseSpec(
        kind=args.kind,
        level=args.level,
        seed=args.seed if args.seed is not None else 0,
    )
    noisy = apply_noise(img, spec)
    out = (
        Path(args.out)
        if args.out
        else Path(args.image).with_name(Path(args.image).stem + "__noisy.pgm")
    )
    write_pgm_file(out, noisy)
    if not args.quiet:
        print(f"wrote {out}")
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse -h/--help
        code = exc.code if isinstance(exc.code, int) else 0
        return code
    except PalmDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (OSError, PgmParseError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(cli_main())
