"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, config_from_dict
from .experiments import NumericalInvariantError, run
from .io import write_results

log = logging.getLogger("blindwitness")

VERBS = {
    "snapshot": "snapshot",
    "flux-sweep": "flux_sweep",
    "visibility-sweep": "visibility_sweep",
    "witness-dynamics": "witness_dynamics",
    "scatterer-control": "scatterer_control",
    "long-run": "long_run",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blindwitness",
        description="Interference device with blind witnesses: experiments and checks.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--workers", type=int, help="worker processes for sweeps")
        p.add_argument("--seed", type=int, help="seed for random witness phases")
        p.add_argument("--propagator", choices=["dense", "layered", "auto"])
    sub.add_parser("validate", help="run the invariant self-checks")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> tuple[dict, Path | None]:
    kind = VERBS[args.verb]
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"config file not found: {args.config}")
        try:
            data = json.loads(args.config.read_text())
        except json.JSONDecodeError as err:
            raise ConfigError(f"{args.config}: malformed JSON ({err})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: top level must be a JSON object")
    else:
        data = {}
    data.setdefault("kind", kind)
    if data["kind"] != kind:
        raise ConfigError(f"config kind {data['kind']!r} does not match verb {args.verb!r}")
    for key in ("workers", "seed", "propagator"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return data, args.config


def cmd_validate() -> int:
    from .validation import run_checks

    ok = True
    for name, passed, value, tol in run_checks():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name:<32} {value:.3e} (tol {tol:.0e})")
    return 0 if ok else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.verb == "validate":
        return cmd_validate()
    try:
        data, config_file = load_config(args)
        cfg = config_from_dict(data)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    try:
        table = run(cfg)
    except NumericalInvariantError as err:
        print(f"numerical invariant failure: {err}", file=sys.stderr)
        return 2
    out = Path(cfg.output) if cfg.output else args.out / f"{cfg.kind}.csv"
    manifest = write_results(table, out, config=cfg.to_dict(), config_file=config_file)
    log.info("wrote %s and %s", out, manifest)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
