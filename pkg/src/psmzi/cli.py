"""Command-line front end: sweeps, scheme comparisons, limits and oracle validation.

Every subcommand emits a table (CSV or JSON) with a deterministic row order.
Rows whose computation fails carry ``nan`` cells and the error name in the
``status`` column instead of aborting the sweep.

Exit codes: 0 success, 2 invalid specification, 3 validation tolerance breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import validation
from .errors import PsmziError, ToleranceBreachError
from .fisher import fisher
from .metrology import limits, optimal_phase, phase_sensitivity
from .model import Detection, SchemeConfig, classify, parse_detection

EXIT_OK, EXIT_SPEC, EXIT_BREACH = 0, 2, 3

SWEEPABLE = ("phi", "alpha", "r", "T", "eta", "m", "n")
INTEGER_VARS = ("m", "n")
OUTPUTS = ("sensitivity", "qfi", "qcrb", "limits")
# sweep variable -> SchemeConfig field
_FIELD = {"alpha": "alpha_mag", "theta_alpha": "alpha_phase"}
CONFIG_COLUMNS = ("alpha", "theta_alpha", "r", "m", "n", "phi", "T", "eta")


class SpecError(ValueError):
    """Invalid command-line or config-file specification."""


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable over a fixed configuration.

    ``values`` is the explicit grid; :func:`parse_sweep` builds it from
    ``VAR=START:STOP:STEPS`` or, for ``m`` and ``n``, ``VAR=0,1,2``.
    """

    var: str | None
    values: tuple
    base: SchemeConfig = field(default_factory=SchemeConfig)
    detections: tuple = ()
    outputs: tuple = ("sensitivity",)
    v: int = 1
    limits_reference: str = "subtracted"

    def __post_init__(self):
        if self.var is not None and self.var not in SWEEPABLE:
            raise SpecError(f"cannot sweep {self.var!r}; choose from {SWEEPABLE}")
        if not self.values:
            raise SpecError("empty sweep")
        if self.var is not None and self.var not in INTEGER_VARS and len(self.values) < 2:
            raise SpecError("a continuous sweep needs at least 2 steps")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown or not self.outputs:
            raise SpecError(f"outputs must be a non-empty subset of {OUTPUTS}")
        if "sensitivity" in self.outputs and not self.detections:
            raise SpecError("sensitivity output needs at least one detection")

    def configs(self):
        if self.var is None:
            return [self.base]
        name = _FIELD.get(self.var, self.var)
        cast = int if self.var in INTEGER_VARS else float
        return [self.base.with_(**{name: cast(v)}) for v in self.values]


def parse_sweep(text: str) -> tuple[str, tuple]:
    """``phi=0.1:3.0:300`` -> ('phi', linspace); ``m=0,1,2,3`` -> ('m', (0, 1, 2, 3))."""
    if "=" not in text:
        raise SpecError(f"sweep must look like VAR=START:STOP:STEPS, got {text!r}")
    var, rng = (s.strip() for s in text.split("=", 1))
    if var not in SWEEPABLE:
        raise SpecError(f"cannot sweep {var!r}; choose from {SWEEPABLE}")
    try:
        if var in INTEGER_VARS and ":" not in rng:
            values = tuple(int(v) for v in rng.split(","))
        else:
            start, stop, steps = rng.split(":")
            steps = int(steps)
            if var in INTEGER_VARS:
                values = tuple(int(v) for v in np.linspace(int(start), int(stop), steps).round())
            else:
                if steps < 2:
                    raise SpecError("a continuous sweep needs at least 2 steps")
                values = tuple(float(v) for v in np.linspace(float(start), float(stop), steps))
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad sweep range {rng!r}: {exc}") from None
    return var, values


# ---------------------------------------------------------------------------
# row computation
# ---------------------------------------------------------------------------

def _config_cells(cfg: SchemeConfig) -> dict:
    return {"alpha": cfg.alpha_mag, "theta_alpha": cfg.alpha_phase, "r": cfg.r, "m": cfg.m,
            "n": cfg.n, "phi": cfg.phi, "T": cfg.T, "eta": cfg.eta, "scheme": cfg.kind.value}


def _columns(outputs, with_detection: bool) -> list:
    cols = list(CONFIG_COLUMNS) + ["scheme"]
    if with_detection:
        cols += ["detection", "delta_phi", "numerator", "denominator"]
    if "limits" in outputs or "sensitivity" in outputs:
        cols += ["N", "SQL", "HL"]
    if "qfi" in outputs or "qcrb" in outputs:
        cols += ["F", "F_L", "n_a_internal"]
    if "qcrb" in outputs:
        cols += ["v", "QCRB", "QCRB_L"]
    return cols + ["status"]


def _row(cfg: SchemeConfig, det: Detection | None, spec: SweepSpec, cols: list) -> dict:
    row = dict.fromkeys(cols, math.nan)
    row.update(_config_cells(cfg))
    if det is not None:
        row["detection"] = det.name
    status = []
    try:
        if det is not None:
            p = phase_sensitivity(cfg, det)
            row.update(delta_phi=p.delta_phi, numerator=p.numerator, denominator=p.denominator)
            if not p.defined:
                status.append("UNDEFINED")
        if "N" in row:
            lim = limits(cfg, spec.limits_reference)
            row.update(N=lim.N, SQL=lim.sql, HL=lim.hl)
        if "F" in row:
            fr = fisher(cfg, spec.v)
            row.update(F=fr.F_ideal, F_L=fr.F_lossy, n_a_internal=fr.n_a)
            if "QCRB" in row:
                row.update(v=spec.v, QCRB=fr.qcrb_ideal, QCRB_L=fr.qcrb_lossy)
    except (PsmziError, ArithmeticError) as exc:
        status.append(type(exc).__name__)
    row["status"] = ";".join(status) or "ok"
    return row


def _row_job(args):
    return _row(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """One row per grid point per detection, in grid-major order."""
    dets = list(spec.detections) if "sensitivity" in spec.outputs else [None]
    cols = _columns(spec.outputs, dets != [None])
    work = [(cfg, det, spec, cols) for cfg in spec.configs() for det in dets]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_row_job, work, chunksize=8))
    return [_row(*w) for w in work]


COMPARE_COLUMNS = ("m", "n", "scheme", "detection", "phi_opt", "delta_phi_opt", "at_edge", "N",
                   "SQL", "HL", "N_input", "SQL_input", "HL_input", "F", "QCRB", "status")


def compare_schemes(base: SchemeConfig, schemes, detections, grid=(0.01, math.pi - 0.01, 200),
                    v: int = 1) -> list[dict]:
    """Optimum sensitivity per scheme and detection, with limits and the QCRB."""
    rows = []
    for m, n in schemes:
        cfg = base.with_(m=m, n=n)
        for det in detections:
            row = dict.fromkeys(COMPARE_COLUMNS, math.nan)
            row.update(m=m, n=n, scheme=classify(m, n).value, detection=det.name, at_edge=False)
            status = "ok"
            try:
                opt = optimal_phase(cfg, det, grid)
                row.update(phi_opt=opt.phi, delta_phi_opt=opt.delta_phi, at_edge=opt.at_edge)
            except (PsmziError, ArithmeticError) as exc:
                status = type(exc).__name__
            try:
                lim, ref = limits(cfg), limits(cfg, "input")
                fr = fisher(cfg, v)
                row.update(N=lim.N, SQL=lim.sql, HL=lim.hl, N_input=ref.N, SQL_input=ref.sql,
                           HL_input=ref.hl, F=fr.F_ideal, QCRB=fr.qcrb_ideal)
            except (PsmziError, ArithmeticError) as exc:
                status = type(exc).__name__
            row["status"] = status
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rows[0].keys())
    for r in rows:
        w.writerow(_cell(v) for v in r.values())
    return buf.getvalue()


def to_json(rows: list[dict]) -> str:
    """JSON array of row objects; ``nan`` cells become ``null``."""
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        if isinstance(v, np.generic):
            return v.item()
        return v
    return json.dumps([{k: clean(v) for k, v in r.items()} for r in rows], indent=1) + "\n"


def emit(rows: list[dict], fmt: str, out: str | None):
    text = to_csv(rows) if fmt == "csv" else to_json(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

_FLAG_FIELDS = {"alpha": float, "theta_alpha": float, "r": float, "m": int, "n": int,
                "phi": float, "T": float, "eta": float}


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("configuration (flags override --config values)")
    g.add_argument("--config", help="JSON file with any of the flag names as keys")
    for name, typ in _FLAG_FIELDS.items():
        g.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None)
    p.add_argument("--sweep", default=None, help="VAR=START:STOP:STEPS (m, n also accept 0,1,2)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--v", type=int, default=None, help="number of repeated measurements")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for row evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psmzi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sensitivity", help="phase sensitivity per detection")
    _common(p)
    p.add_argument("--detection", action="append", default=None,
                   help="na, nb, ndiff, xa, xb, custom:c,d or customx:c,d (repeatable)")
    p.add_argument("--limits-reference", choices=("subtracted", "input"), default=None)

    for name, hlp in (("qfi", "ideal and lossy quantum Fisher information"),
                      ("qcrb", "quantum Cramer-Rao bounds"),
                      ("limits", "SQL and HL for the mean photon number")):
        p = sub.add_parser(name, help=hlp)
        _common(p)
        if name == "limits":
            p.add_argument("--limits-reference", choices=("subtracted", "input"), default=None)

    p = sub.add_parser("compare-schemes", help="optimum sensitivity per subtraction scheme")
    _common(p)
    p.add_argument("--detection", action="append", default=None)
    p.add_argument("--schemes", default=None,
                   help="space-separated m,n pairs (default '0,0 2,0 0,2 1,1')")
    p.add_argument("--phi-grid", default=None, help="START:STOP:STEPS for the optimum scan")

    p = sub.add_parser("validate", help="cross-check analytic results against the Fock oracle")
    p.add_argument("--grid", choices=sorted(validation.GRIDS), default="default")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--cutoff", type=int, default=30,
                   help="smallest starting cutoff; raised to the suggested one and escalated "
                        "until successive changes fall below 1e-8")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--quiet", action="store_true")
    return parser


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (flags win)."""
    merged = {"alpha": 1.0, "theta_alpha": 0.0, "r": 1.0, "m": 0, "n": 0, "phi": 0.0,
              "T": 1.0, "eta": 1.0, "sweep": None, "format": "csv", "v": 1,
              "detection": None, "limits_reference": "subtracted", "schemes": None,
              "phi_grid": None}
    file_vals = _load_config_file(getattr(args, "config", None))
    unknown = set(file_vals) - set(merged)
    if unknown:
        raise SpecError(f"unknown config keys: {sorted(unknown)}")
    merged.update(file_vals)
    explicit = {k for k, v in vars(args).items() if v is not None}
    merged.update({k: v for k, v in vars(args).items() if k in merged and v is not None})
    merged["_fixed"] = (explicit | set(file_vals)) & set(_FLAG_FIELDS)
    return merged


def _config_from(opts: dict) -> SchemeConfig:
    try:
        return SchemeConfig(alpha_mag=float(opts["alpha"]), alpha_phase=float(opts["theta_alpha"]),
                            r=float(opts["r"]), m=opts["m"], n=opts["n"], phi=float(opts["phi"]),
                            T=float(opts["T"]), eta=float(opts["eta"]))
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from None


def _detections(opts: dict, default=("ndiff",)) -> tuple:
    names = opts["detection"] if opts["detection"] is not None else list(default)
    if isinstance(names, str):
        names = [names]
    try:
        return tuple(parse_detection(n) for n in names)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def _sweep_spec(opts: dict, outputs, detections=()) -> SweepSpec:
    var, values = (None, (None,))
    if opts["sweep"]:
        var, values = parse_sweep(opts["sweep"])
        if var in opts["_fixed"]:
            raise SpecError(f"{var} is both swept and fixed")
    return SweepSpec(var, values, _config_from(opts), detections, outputs, int(opts["v"]),
                     opts["limits_reference"])


def _parse_schemes(text) -> list:
    if text is None:
        return [(0, 0), (2, 0), (0, 2), (1, 1)]
    try:
        pairs = [tuple(int(x) for x in tok.split(",")) for tok in str(text).split()]
    except ValueError:
        raise SpecError(f"bad scheme list {text!r}") from None
    if not pairs or any(len(p) != 2 or min(p) < 0 for p in pairs):
        raise SpecError(f"bad scheme list {text!r}")
    return pairs


def _run_validate(args) -> int:
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    report = validation.run_validate(args.grid, args.tol, min_cutoff=args.cutoff)
    for line in report.summary_lines():
        log(line)
    rows = [{"quantity": k, "max_rel_dev": v}
            for k, v in sorted(report.max_deviation_by_quantity().items())]
    rows += [{"quantity": f"photon_number_ratio[m={c.m},n={c.n},alpha={c.alpha_mag},r={c.r}]",
              "max_rel_dev": ratio} for c, ratio in report.photon_number_ratios]
    if args.out:
        emit(rows, args.format, args.out)
    try:
        report.raise_on_breach()
    except ToleranceBreachError as exc:
        print(f"TOLERANCE_BREACH: {exc}", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            if args.tol <= 0:
                raise SpecError("--tol must be positive")
            return _run_validate(args)
        opts = resolve(args)
        if args.command == "sensitivity":
            spec = _sweep_spec(opts, ("sensitivity",), _detections(opts))
            rows = run_sweep(spec, args.jobs)
        elif args.command in ("qfi", "qcrb", "limits"):
            rows = run_sweep(_sweep_spec(opts, (args.command,)), args.jobs)
        else:
            if opts["sweep"]:
                raise SpecError("compare-schemes does not take --sweep")
            grid = (0.01, math.pi - 0.01, 200)
            if opts["phi_grid"]:
                a, b, k = opts["phi_grid"].split(":")
                grid = (float(a), float(b), int(k))
            rows = compare_schemes(_config_from(opts), _parse_schemes(opts["schemes"]),
                                   _detections(opts, ("ndiff", "xb")), grid, int(opts["v"]))
        emit(rows, opts["format"], args.out)
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
