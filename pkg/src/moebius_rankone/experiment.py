"""Experiment configs, validation and command dispatch behind the CLI."""

from __future__ import annotations

import csv
import json
import math
import re
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from math import isqrt, pi
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import __version__
from . import averages as avg
from . import numtheory as nt
from . import spectral as sp
from . import symbolic as sym
from .errors import InvalidArgument
from .paramfile import load_params

COMMANDS = (
    "sieve", "words", "measure", "avg", "hopf", "dkbsz",
    "spectra", "hellinger", "klemes", "peyriere", "divergence",
)
RANK_ONE_COMMANDS = {"words", "measure", "spectra", "hellinger", "klemes", "peyriere", "divergence"}
MODELS = ("rank-one", "integer-shift", "boole")


@dataclass
class ExperimentConfig:
    command: str
    params: str | None = None  # parameter file or built-in system name
    model: str = "rank-one"
    point: str = "canonical"
    start: int = 0
    x0: float = 0.5
    limit: int | None = None
    stages: int | None = None
    checkpoints: list[int] = field(default_factory=lambda: list(nt.DEFAULT_CHECKPOINTS))
    grid: int | None = None
    p: int | None = None
    q: int | None = None
    weight: str = "mobius"
    observable: str = "const:1"
    density: str = "cauchy"
    word: str = "1"
    threshold: float = 10.0
    length_cap: int = sym.DEFAULT_LENGTH_CAP
    eta: int | None = None
    truncation: int | None = None
    horizon: int | None = None
    modulus: int = 3
    out: str | None = None
    dump_words: bool = False

    @classmethod
    def from_mapping(cls, command: str, doc: dict[str, Any]) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        return cls(**{**doc, "command": command})

    @classmethod
    def from_file(cls, command: str, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        doc = {k.replace("-", "_"): v for k, v in doc.items()}
        return cls.from_mapping(command, doc)

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("out")
        return d


@dataclass
class ExperimentReport:
    command: str
    config: dict[str, Any]
    tables: dict[str, list[dict[str, Any]]]
    summary: dict[str, Any]
    wall_clock: float = 0.0
    version: str = __version__

    def payload(self) -> dict[str, Any]:
        """The numeric payload: identical configs give identical payloads."""
        return {"command": self.command, "config": self.config, "summary": self.summary, "tables": self.tables}

    def summary_text(self) -> str:
        doc = {"command": self.command, "version": self.version, "config": self.config,
               "summary": self.summary, "wall_clock_s": round(self.wall_clock, 3)}
        return dumps(doc)

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, rows in self.tables.items():
            path = out / f"{self.command}.{name}.csv"
            write_csv(path, rows)
            written.append(path)
        path = out / f"{self.command}.summary.json"
        path.write_text(self.summary_text() + "\n", encoding="utf-8")
        written.append(path)
        return written


def fmt(v: Any) -> Any:
    """17 significant digits for floats (round-trip exact); exact fractions as p/q."""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


_F17 = "@@f17:"


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and math.isfinite(obj):
        return _F17 + fmt(obj)  # unquoted after dumping
    return fmt(obj)


def dumps(obj: Any) -> str:
    """JSON with every finite float written at 17 significant digits."""
    text = json.dumps(_plain(obj), indent=2, sort_keys=True)
    return re.sub(r'"' + _F17 + r'([^"]+)"', r"\1", text)


def write_csv(path: str | Path, rows: list[dict[str, Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: fmt(v) for k, v in r.items()})


# --- parsing helpers --------------------------------------------------------


def parse_observable(text: str) -> avg.Observable:
    kind, _, rest = text.partition(":")
    if kind in ("mobius", "liouville"):
        return avg.ArithmeticFunction(kind)
    if kind == "cauchy":
        return avg.cauchy_density()
    if kind == "const":
        return avg.Constant(float(rest or 1))
    if kind in ("cylinder", "centered"):
        word, _, k = rest.partition("@")
        cls = avg.CylinderIndicator if kind == "cylinder" else avg.CylinderIndicatorCentered
        return cls(word, int(k or 0))
    if kind == "point":
        return avg.FinitelySupported({int(rest): 1.0})
    if kind == "finite":
        items = (item.split("=") for item in rest.split(",") if item)
        return avg.FinitelySupported({int(k): float(v) for k, v in items})
    if kind == "interval":
        a, b = rest.split(":")
        return avg.IndicatorInterval(float(a), float(b))
    raise InvalidArgument(f"unknown observable {text!r}")


def _is_pow2(n: int) -> bool:
    return isinstance(n, int) and n >= 2 and n & (n - 1) == 0


def _is_prime(n) -> bool:
    return isinstance(n, int) and n >= 2 and all(n % d for d in range(2, isqrt(n) + 1))


def _needs_params(cfg: ExperimentConfig) -> bool:
    return cfg.command in RANK_ONE_COMMANDS or (
        cfg.command in ("avg", "hopf", "dkbsz") and cfg.model == "rank-one"
    )


def validate(cfg: ExperimentConfig) -> list[str]:
    """Violations as ``field: reason`` strings; empty iff ``run`` may proceed.

    A parameter file that cannot be read raises OSError.
    """
    v: list[str] = []
    c = cfg.command
    if c not in COMMANDS:
        return [f"command: unknown command {c!r}"]

    def need(name, ok, reason):
        if not ok:
            v.append(f"{name}: {reason}")

    if _needs_params(cfg):
        if not cfg.params:
            v.append("params: a parameter file or built-in system is required")
        elif cfg.params not in ("chacon", "tripling", "odometer"):
            if not Path(cfg.params).exists():
                raise OSError(f"cannot read parameter file {cfg.params}")
            try:
                load_params(cfg.params).stage(0, 1)
            except (InvalidArgument, KeyError, TypeError, ValueError) as exc:
                v.append(f"params: {exc}")
    if cfg.grid is not None:
        need("grid", _is_pow2(cfg.grid), f"{cfg.grid} is not a power of two")
    cps = cfg.checkpoints
    if c in ("avg", "hopf", "dkbsz") or (c == "sieve" and cps):
        need("checkpoints", bool(cps) and all(isinstance(x, int) and x >= 1 for x in cps),
             "checkpoints must be positive integers")
        need("checkpoints", all(b > a for a, b in zip(cps, cps[1:])), "checkpoints must be ascending")
    if c == "sieve":
        need("limit", isinstance(cfg.limit, int) and cfg.limit >= 1, "limit must be a positive integer")
    if c in ("words", "measure", "spectra", "hellinger"):
        need("stages", isinstance(cfg.stages, int) and cfg.stages >= 1, "stages must be >= 1")
    if c == "measure":
        need("word", bool(cfg.word) and not set(cfg.word) - {"0", "1"}, "word must be a nonempty 0/1 string")
    if c in ("avg", "hopf", "dkbsz"):
        need("model", cfg.model in MODELS, f"model must be one of {MODELS}")
        need("point", cfg.point in ("canonical", "ones"), "point must be canonical or ones")
        need("x0", cfg.model != "boole" or cfg.x0 != 0, "Boole orbit cannot start at 0")
        try:
            parse_observable(cfg.observable)
        except (InvalidArgument, ValueError) as exc:
            v.append(f"observable: {exc}")
    if c in ("avg", "hopf"):
        need("weight", cfg.weight in avg.WEIGHTS, f"weight must be one of {avg.WEIGHTS}")
    if c == "hopf":
        try:
            parse_observable(cfg.density)
        except (InvalidArgument, ValueError) as exc:
            v.append(f"density: {exc}")
    if c in ("dkbsz", "hellinger", "peyriere"):
        need("p", _is_prime(cfg.p), f"p={cfg.p} is not a prime")
        need("q", _is_prime(cfg.q), f"q={cfg.q} is not a prime")
        need("q", cfg.p != cfg.q, "p and q must be distinct")
    if c in ("dkbsz", "hellinger"):
        need("grid", cfg.grid is not None, "grid is required")
    if c == "dkbsz" and cfg.grid and _is_prime(cfg.p) and _is_prime(cfg.q) and cps:
        need("grid", cfg.grid > 2 * max(cfg.p, cfg.q) * cps[-1],
             "grid must exceed 2 max(p,q) N for the largest checkpoint")
    if c in ("klemes", "peyriere"):
        need("truncation", isinstance(cfg.truncation, int) and cfg.truncation >= 1, "truncation must be >= 1")
        need("eta", cfg.eta is None or cfg.eta in (0, 1, 2), "eta must be 0, 1 or 2")
    if c == "divergence":
        need("modulus", isinstance(cfg.modulus, int) and cfg.modulus >= 1, "modulus must be >= 1")
        need("horizon", isinstance(cfg.horizon, int) and cfg.horizon >= cfg.modulus,
             "horizon must be >= modulus")
    return v


# --- commands ---------------------------------------------------------------


def _model(cfg: ExperimentConfig):
    if cfg.model == "rank-one":
        return avg.RankOneSubshift(load_params(cfg.params), cfg.point, cfg.length_cap)
    if cfg.model == "integer-shift":
        return avg.IntegerShift(cfg.start)
    return avg.BooleMap(cfg.x0)


def _series_rows(series: avg.AverageSeries):
    return series.rows()


def _cmd_sieve(cfg):
    table = nt.sieve(cfg.limit)
    cps = [c for c in cfg.checkpoints if c <= cfg.limit] or [cfg.limit]
    if cps[-1] != cfg.limit:
        cps.append(cfg.limit)
    rows = [{"N": N, "mertens": int(table.mertens[N]), "mertens_over_N": table.mertens[N] / N,
             "squarefree_density": nt.squarefree_density(N, table)} for N in cps]
    tables = {"mertens": rows}
    summary = {"limit": cfg.limit, "mertens": int(table.mertens[cfg.limit]),
               "squarefree_density": rows[-1]["squarefree_density"], "six_over_pi_squared": 6 / pi**2}
    if cfg.grid:
        scan = nt.twisted_sum_scan(cfg.limit, cfg.grid, cps, table)
        tables["twisted"] = [{"N": N, "sup": s, "sup_over_N": s / N, "argmax_t": t}
                             for N, s, t in zip(scan.checkpoints, scan.suprema, scan.argmax_t)]
        summary["twisted_loglog_slope"] = scan.slope
    return tables, summary, {}


def _cmd_words(cfg):
    params = load_params(cfg.params)
    blocks = sym.build_blocks(params, cfg.stages, cfg.length_cap)
    stages = params.stage_list(cfg.stages + 1)
    rows = [{"n": b.stage, "p_n": st.p, "spacers": " ".join(map(str, st.spacers)), "height": b.height,
             "zeros": b.zeros, "ones": b.ones, "materialized": b.word is not None}
            for b, st in zip(blocks, stages)]
    extra = {}
    if cfg.dump_words:
        extra["words.txt"] = "".join(b.word + "\n" for b in blocks if b.word is not None)
    return {"blocks": rows}, {"system": params.name, "heights": [b.height for b in blocks]}, extra


def _cmd_measure(cfg):
    params = load_params(cfg.params)
    series = sym.cylinder_measure(params, cfg.word, cfg.stages)
    rows = [{"n": n, "ratio": float(r), "ratio_exact": r} for n, r in enumerate(series.ratios)]
    summary = {"word": cfg.word, "estimate": float(series.estimate), "estimate_exact": series.estimate}
    if cfg.stages >= 3:
        summary["infinite_verdict"] = sym.is_infinite(params, cfg.stages, cfg.threshold).verdict
    return {"ratios": rows}, summary, {}


def _cmd_avg(cfg):
    s = avg.weighted_average(_model(cfg), parse_observable(cfg.observable), cfg.checkpoints, cfg.weight)
    return {"series": _series_rows(s)}, {"final": s.values[-1]}, {}


def _cmd_hopf(cfg):
    f, p = parse_observable(cfg.observable), parse_observable(cfg.density)
    fi = getattr(f, "integral", None)
    s = avg.hopf_ratio(_model(cfg), f, p, cfg.checkpoints, cfg.weight,
                       f_abs_integral=fi, p_integral=getattr(p, "integral", None))
    return {"series": _series_rows(s)}, {"final": s.values[-1], "bound": s.bound}, {}


def _cmd_dkbsz(cfg):
    model, f = _model(cfg), parse_observable(cfg.observable)
    s = avg.dkbsz_correlation(model, f, cfg.p, cfg.q, cfg.checkpoints)
    values = avg.orbit_values(model, f, cfg.checkpoints[-1])
    rows = []
    for N, c in zip(s.checkpoints, s.values):
        b = sp.dkbsz_bound(values, cfg.p, cfg.q, N, cfg.grid)
        rows.append({"N": N, "correlation": c, "lhs": b.lhs, "rhs": b.rhs, "hellinger": b.affinity,
                     "holds": b.holds})
    return {"series": rows}, {"all_hold": all(r["holds"] for r in rows)}, {}


def _cmd_spectra(cfg):
    params = load_params(cfg.params)
    factors = sp.riesz_factors(params, range(cfg.stages))
    coeffs = sp.product_coeffs(factors)
    tables = {"coefficients": [{"freq": int(k), "re": a.real, "im": a.imag}
                               for k, a in zip(coeffs.freqs, coeffs.amps)]}
    summary = {"c0": coeffs.coefficient(0).real, "max_frequency": coeffs.max_frequency}
    if cfg.grid:
        dens = sp.evaluate_density(factors, cfg.grid)
        tables["density"] = [{"t": t, "value": v} for t, v in zip(dens.t, dens.samples)]
        summary["grid_mean"] = dens.mean()
    return tables, summary, {}


def _cmd_hellinger(cfg):
    params = load_params(cfg.params)
    factors = sp.riesz_factors(params, range(cfg.stages))
    rows = []
    for K in range(1, cfg.stages + 1):
        a = sp.evaluate_density(factors[:K], cfg.grid, dilation=cfg.p)
        b = sp.evaluate_density(factors[:K], cfg.grid, dilation=cfg.q)
        rows.append({"stages": K, "hellinger": sp.hellinger(a, b)})
    return {"series": rows}, {"hellinger": rows[-1]["hellinger"]}, {}


def _cmd_klemes(cfg):
    params = load_params(cfg.params)
    eta = cfg.eta if cfg.eta is not None else sp.divergence_residue(params, 30).eta
    plan = sp.SubsequencePlan.arithmetic(eta, max(cfg.truncation, 3) + 1)
    rows = [{"j": r.j, "K": r.K, "alpha_mj": float(r.alpha_mj), "alpha_mj_exact": r.alpha_mj,
             "predicted": float(r.predicted), "alpha_sum": float(r.alpha_sum),
             "alpha_product": float(r.alpha_product),
             "increment": "" if r.increment is None else float(r.increment)}
            for r in sp.klemes_reinhold_check(params, plan, cfg.truncation)]
    return {"table": rows}, {"eta": eta, "m": sp.mj_sequence(params, plan)}, {}


def _cmd_peyriere(cfg):
    params = load_params(cfg.params)
    eta = cfg.eta if cfg.eta is not None else 0
    rep = sp.dilation_pair_diagnostics(params, cfg.p, cfg.q, cfg.truncation, eta)
    rows = [{"J": J + 1, "br1_a": a, "br1_b": b, "br2": c}
            for J, (a, b, c) in enumerate(zip(rep.br1_a, rep.br1_b, rep.br2))]
    J = np.arange(1, len(rep.br2) + 1)
    slope = float(np.polyfit(J, rep.br2, 1)[0]) if len(J) >= 2 else rep.br2[0]
    return {"series": rows}, {"br2_slope": slope, "br1_a_max": max(rep.br1_a), "br1_b_max": max(rep.br1_b)}, {}


def _cmd_divergence(cfg):
    rep = sp.divergence_residue(load_params(cfg.params), cfg.horizon, cfg.modulus)
    rows = [{"residue": r, "partial_sum": s} for r, s in enumerate(rep.sums)]
    return {"residues": rows}, {"eta": rep.eta}, {}


DISPATCH: dict[str, Callable] = {
    "sieve": _cmd_sieve, "words": _cmd_words, "measure": _cmd_measure, "avg": _cmd_avg,
    "hopf": _cmd_hopf, "dkbsz": _cmd_dkbsz, "spectra": _cmd_spectra, "hellinger": _cmd_hellinger,
    "klemes": _cmd_klemes, "peyriere": _cmd_peyriere, "divergence": _cmd_divergence,
}


def run(command: str, cfg: ExperimentConfig) -> ExperimentReport:
    """Validate, dispatch and (if ``cfg.out`` is set) write the outputs."""
    cfg.command = command
    problems = validate(cfg)
    if problems:
        raise InvalidArgument("; ".join(problems))
    t0 = time.perf_counter()
    tables, summary, extra = DISPATCH[command](cfg)
    report = ExperimentReport(command, cfg.echo(), tables, summary, time.perf_counter() - t0)
    if cfg.out:
        report.write(cfg.out)
        for name, text in extra.items():
            (Path(cfg.out) / f"{command}.{name}").write_text(text, encoding="ascii")
    return report
