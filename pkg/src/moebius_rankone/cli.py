"""Command-line entry point: ``moebius-rankone <command> [options]``."""

from __future__ import annotations

import argparse
import sys

from .errors import InvalidArgument, ResourceError
from .experiment import COMMANDS, ExperimentConfig, run, validate


def _ints(text: str) -> list[int]:
    return [int(float(x)) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moebius-rankone", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="YAML file with config fields (flags override it)")
    ap.add_argument("--params", help="rank-one parameter file, or chacon / tripling / odometer")
    ap.add_argument("--model", choices=("rank-one", "integer-shift", "boole"))
    ap.add_argument("--point", choices=("canonical", "ones"))
    ap.add_argument("--start", type=int)
    ap.add_argument("--x0", type=float)
    ap.add_argument("--limit", type=lambda s: int(float(s)))
    ap.add_argument("--stages", type=int)
    ap.add_argument("--checkpoints", type=_ints, help="ascending list, e.g. '1e3 1e4 1e5'")
    ap.add_argument("--grid", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--q", type=int)
    ap.add_argument("--weight", choices=("mobius", "liouville", "none"))
    ap.add_argument("--observable", help="const:C, cylinder:V[@K], centered:V[@K], point:K, "
                    "finite:K=V,..., mobius, liouville, interval:A:B, cauchy")
    ap.add_argument("--density", help="positive observable for hopf denominators")
    ap.add_argument("--word")
    ap.add_argument("--threshold", type=float)
    ap.add_argument("--length-cap", dest="length_cap", type=int)
    ap.add_argument("--eta", type=int)
    ap.add_argument("--truncation", type=int)
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--modulus", type=int)
    ap.add_argument("--out", help="directory for CSV tables and the JSON summary")
    ap.add_argument("--dump-words", dest="dump_words", action="store_true", default=None)
    ap.add_argument("--validate-only", action="store_true")
    return ap


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(ns.command, ns.config) if ns.config else ExperimentConfig(ns.command)
    for key, value in vars(ns).items():
        if key in ("command", "config", "validate_only") or value is None:
            continue
        setattr(cfg, key, value)
    return cfg


def _fail(kind: str, message: str, code: int) -> int:
    print(f"error: {kind}: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        problems = validate(cfg)
        if problems:
            return _fail("invalid-config", "; ".join(problems), 2)
        if ns.validate_only:
            print("ok")
            return 0
        report = run(ns.command, cfg)
    except OSError as exc:
        return _fail("io", exc, 4)
    except ResourceError as exc:
        return _fail("resource", exc, 3)
    except InvalidArgument as exc:
        return _fail("invalid-config", exc, 2)
    except ArithmeticError as exc:
        return _fail("computation", exc, 1)
    print(report.summary_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
