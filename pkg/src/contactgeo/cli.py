"""Command line entry point: run a verification suite and emit a report.

Every flag can also be supplied through an environment variable with the
``CONTACTGEO_`` prefix (``CONTACTGEO_MODEL``, ``CONTACTGEO_SUITE``,
``CONTACTGEO_T``, ``CONTACTGEO_LAMBDA``, ``CONTACTGEO_A``,
``CONTACTGEO_SAMPLES``, ``CONTACTGEO_SEED``, ``CONTACTGEO_TOL``,
``CONTACTGEO_FORMAT``, ``CONTACTGEO_ENGINE``, ``CONTACTGEO_FD_STEP``,
``CONTACTGEO_OUT``); list-valued variables take comma-separated entries.
Explicit flags win over environment variables.

Exit status: 0 all checks pass, 1 at least one identity check fails,
2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .models import ModelBuildError
from .report import SUITES, UsageError, emit_report, run_suite

ENV_PREFIX = "CONTACTGEO_"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _env(name: str) -> str | None:
    value = os.environ.get(ENV_PREFIX + name)
    return value if value else None


def _env_list(name: str) -> list[str] | None:
    value = _env(name)
    if value is None:
        return None
    return [part.strip() for part in value.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify",
        description="Run a verification suite on a registered model and "
                    "report per-check residuals.",
        epilog="Each flag falls back to the CONTACTGEO_* environment "
               "variable of the same name (e.g. CONTACTGEO_MODEL); "
               "list-valued variables are comma-separated.",
    )
    parser.add_argument("--model", default=_env("MODEL"),
                        help="model name: flat_cosymplectic, s5_se, s5_anc")
    parser.add_argument("--suite", default=_env("SUITE"),
                        help=f"suite name: one of {', '.join(SUITES)}")
    parser.add_argument("--t", action="append", type=float, default=None,
                        metavar="RAD",
                        help="circle-family angle in radians; repeatable "
                             "(default grid: 0, pi/4, pi/2, 1.3)")
    parser.add_argument("--lambda", dest="lam", type=float,
                        default=float(_env("LAMBDA") or 1.0), metavar="R",
                        help="structure scale lambda (only 1 is registered)")
    parser.add_argument("--a", action="append", type=float, default=None,
                        metavar="R",
                        help="deformation ratio; repeatable "
                             "(default grid: 2/3, 1, 3/2)")
    parser.add_argument("--samples", type=int,
                        default=int(_env("SAMPLES")) if _env("SAMPLES") else None,
                        metavar="N", help="number of sample points")
    parser.add_argument("--seed", type=int,
                        default=int(_env("SEED")) if _env("SEED") else None,
                        metavar="U64", help="sampler seed")
    parser.add_argument("--tol", action="append", default=None,
                        metavar="CHECK_ID=R",
                        help="tolerance override for one check id (or its "
                             "base id without the [t=...] suffix); repeatable")
    parser.add_argument("--format", choices=("json", "text"),
                        default=_env("FORMAT") or "json",
                        help="report format (default: json)")
    parser.add_argument("--engine", choices=("autodiff", "fd"),
                        default=_env("ENGINE") or "autodiff",
                        help="derivative engine (default: autodiff)")
    parser.add_argument("--fd-step", type=float,
                        default=float(_env("FD_STEP") or 5e-3), metavar="H",
                        help="finite-difference step for --engine fd")
    parser.add_argument("--out", default=_env("OUT"), metavar="PATH",
                        help="write the report to PATH instead of stdout")
    return parser


def _parse_tols(entries: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for entry in entries:
        if "=" not in entry:
            raise UsageError(f"bad --tol entry {entry!r}; expected "
                             "CHECK_ID=VALUE")
        key, _, raw = entry.partition("=")
        key = key.strip()
        try:
            value = float(raw)
        except ValueError:
            raise UsageError(f"bad --tol value {raw!r} for {key!r}") from None
        if not key or value <= 0:
            raise UsageError(f"bad --tol entry {entry!r}; the id must be "
                             "nonempty and the value positive")
        out[key] = value
    return out


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
    except ValueError as exc:
        # Malformed numeric environment variables surface here.
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help; pass both through.
        return int(exc.code or 0)

    try:
        if args.model is None:
            raise UsageError("--model is required (or set CONTACTGEO_MODEL)")
        if args.suite is None:
            raise UsageError("--suite is required (or set CONTACTGEO_SUITE)")
        if args.samples is None:
            raise UsageError("--samples is required (or set "
                             "CONTACTGEO_SAMPLES)")
        if args.seed is None:
            raise UsageError("--seed is required (or set CONTACTGEO_SEED)")
        if args.samples < 1:
            raise UsageError("--samples must be at least 1")
        if args.seed < 0 or args.seed >= 2 ** 64:
            raise UsageError("--seed must fit in an unsigned 64-bit integer")

        t_grid = args.t
        if t_grid is None and _env_list("T") is not None:
            t_grid = [float(v) for v in _env_list("T")]
        a_grid = args.a
        if a_grid is None and _env_list("A") is not None:
            a_grid = [float(v) for v in _env_list("A")]
        tol_entries = args.tol
        if tol_entries is None and _env_list("TOL") is not None:
            tol_entries = _env_list("TOL")
        tols = _parse_tols(tol_entries or [])

        report = run_suite(
            args.model, args.suite,
            t_grid=t_grid, lam=args.lam, a_grid=a_grid,
            n_points=args.samples, seed=args.seed, tol_overrides=tols,
            engine=args.engine, fd_step=args.fd_step,
        )
        payload = emit_report(report, args.format)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelBuildError as exc:
        print(f"internal error: model self-check failed: {exc}",
              file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 — map anything else to exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    if args.out:
        try:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"internal error: cannot write {args.out}: {exc}",
                  file=sys.stderr)
            return EXIT_INTERNAL
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    print(f"wall time: {report.wall_time:.2f} s", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
