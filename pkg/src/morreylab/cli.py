"""Command line entry point: run named experiments and write CSV/JSON (and optional SVG) outputs.

Exit codes: 0 all bands satisfied, 1 violations found, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .experiments import EXPERIMENTS, ConfigError, ExperimentSpec, run, spec_for, write_result

log = logging.getLogger("morreylab")


def _band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"band must be 'lo,hi', got {text!r}") from exc
    return lo, hi


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morreylab", description=__doc__.splitlines()[0])
    ap.add_argument("experiment", choices=EXPERIMENTS + ("all",))
    ap.add_argument("--config", help="JSON file with ExperimentSpec fields")
    ap.add_argument("--out", help="output directory (default: 'out' or the config value)")
    ap.add_argument("--band", type=_band, help="comparability band lo,hi (default 1/16,16)")
    ap.add_argument("--seed", type=_seed, help="RNG seed for randomized suites")
    ap.add_argument("--refine", type=int, help="refinement levels (default 3)")
    ap.add_argument("--plot", action="store_true", help="also write an SVG figure per experiment")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides: dict = {}
    try:
        if args.config:
            with open(args.config) as fh:
                overrides = json.load(fh)
            if not isinstance(overrides, dict):
                raise ConfigError("config must be a JSON object")
        for key, val in (("out", args.out), ("band", args.band), ("seed", args.seed), ("levels", args.refine)):
            if val is not None:
                overrides[key] = val
        base = ExperimentSpec.from_dict({k: v for k, v in overrides.items() if k in ("out", "band", "seed", "levels")})
        names = EXPERIMENTS if args.experiment == "all" else (args.experiment,)
        specs = {n: spec_for(n, base, overrides) for n in names}
    except (OSError, json.JSONDecodeError, ConfigError, TypeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    results = []
    for n in names:
        t0 = time.time()
        res = run(n, specs[n])
        log.info("%s: %d rows, %d violations, %.1fs", n, len(res.rows), res.violations, time.time() - t0)
        results.append(res)
    # gather, then write
    for res in results:
        csv_path, _ = write_result(res, specs[res.name].out)
        line = f"{res.name}: {'ok' if res.passed else 'VIOLATIONS'} ({res.violations}) -> {csv_path}"
        if args.plot:
            from .plotting import plot_result

            line += f", {plot_result(res, specs[res.name].out)}"
        print(line)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
