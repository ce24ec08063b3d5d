"""Command-line interface.

Exit codes: 0 success / verification pass, 1 verification failure,
2 usage error, 3 numerical failure.

Data goes to ``--output`` if given, else to ``$STIELTJES_OUTPUT_DIR/<command>.<format>``
if that variable is set, else to standard output.  A short human-readable
summary goes to standard output, or to standard error when the data itself
occupies standard output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import qhj
from .crossval import CrossReport, verify_family, verify_model
from .electrostatics import field_for_family, solve_equilibrium
from .errors import NumericalError
from .numkernel import ClosedCurve
from .orthopoly import PolynomialFamily, zeros

OUTPUT_DIR_ENV = "STIELTJES_OUTPUT_DIR"

FAMILY_COMMANDS = {"zeros", "equilibrium", "verify"}
MODEL_COMMANDS = {"spectrum", "riccati", "quantize", "nodes", "verify-model"}
EITHER_COMMANDS = {"field", "sweep"}
COMMANDS = sorted(FAMILY_COMMANDS | MODEL_COMMANDS | EITHER_COMMANDS)

REPORT_COLUMNS = ["subject", "n", "dev_zeros_eq", "dev_eq_nodes", "min_hess_eig", "J", "pass"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    m: Optional[float] = None
    p: Optional[float] = None
    q: Optional[float] = None
    model: Optional[str] = None
    l: Optional[int] = None
    n: Optional[int] = None
    n_lo: Optional[int] = None
    n_hi: Optional[int] = None
    tol: float = 1e-9
    format: str = "csv"
    output: Optional[str] = None
    center: Optional[float] = None
    semi_real: Optional[float] = None
    semi_imag: Optional[float] = None
    points: Optional[int] = None
    jobs: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if (self.family is None) == (self.model is None):
            if self.command in EITHER_COMMANDS:
                raise UsageError("give exactly one of --family or --model")
        if self.command in FAMILY_COMMANDS and self.family is None:
            raise UsageError(f"{self.command} needs --family")
        if self.command in FAMILY_COMMANDS and self.model is not None:
            raise UsageError(f"{self.command} takes --family, not --model")
        if self.command in MODEL_COMMANDS and self.model is None:
            raise UsageError(f"{self.command} needs --model")
        if self.command in MODEL_COMMANDS and self.family is not None:
            raise UsageError(f"{self.command} takes --model, not --family")
        if self.family is not None and self.family not in ("hermite", "laguerre", "jacobi"):
            raise UsageError(f"unknown family {self.family!r}")
        if self.model is not None and self.model not in ("oscillator", "coulomb"):
            raise UsageError(f"unknown model {self.model!r}")
        if self.family == "laguerre" and self.m is None:
            raise UsageError("laguerre needs --m")
        if self.family == "jacobi" and (self.p is None or self.q is None):
            raise UsageError("jacobi needs --p and --q")
        if self.model == "coulomb" and self.l is None:
            raise UsageError("coulomb needs --l")
        ranged = self.n_lo is not None or self.n_hi is not None
        if self.command == "sweep" or (self.command == "spectrum" and ranged):
            if self.n_lo is None or self.n_hi is None:
                raise UsageError("give both --n-lo and --n-hi")
            if not 1 <= self.n_lo <= self.n_hi <= 200:
                raise UsageError("n-range must satisfy 1 <= n_lo <= n_hi <= 200")
        elif self.command == "field" and self.family is not None:
            pass
        elif self.n is None:
            raise UsageError(f"{self.command} needs --n")
        elif not 0 <= self.n <= 200 or (self.command in FAMILY_COMMANDS and self.n < 1):
            raise UsageError(f"--n out of range: {self.n}")
        if not self.tol > 0:
            raise UsageError("--tol must be > 0")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")

    def polynomial_family(self) -> PolynomialFamily:
        try:
            if self.family == "hermite":
                return PolynomialFamily.hermite()
            if self.family == "laguerre":
                return PolynomialFamily.laguerre(self.m)
            return PolynomialFamily.jacobi(self.p, self.q)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def quantum_model(self):
        try:
            return qhj.build_model(self.model, self.l)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def curve(self) -> Optional[ClosedCurve]:
        given = [self.center, self.semi_real, self.semi_imag]
        if all(v is None for v in given) and self.points is None:
            return None
        if any(v is None for v in given):
            raise UsageError("curve override needs --center, --semi-real and --semi-imag")
        try:
            return ClosedCurve(self.center, self.semi_real, self.semi_imag, self.points or 512)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _report_row(r: CrossReport) -> dict:
    return {
        "subject": r.subject, "n": r.n, "dev_zeros_eq": r.dev_zeros_eq,
        "dev_eq_nodes": r.dev_eq_nodes, "min_hess_eig": r.min_hess_eig,
        "J": r.J, "pass": r.passed,
    }


# ---------------------------------------------------------------------------
# commands: each returns (data text, summary text, exit code)
# ---------------------------------------------------------------------------

def _cmd_zeros(cfg: RunConfig):
    fam = cfg.polynomial_family()
    zs = zeros(fam, cfg.n)
    if cfg.format == "json":
        data = to_json({"subject": fam.label, "n": cfg.n, "positions": list(zs.positions)})
    else:
        data = to_csv(["k", "x"], [{"k": k, "x": x} for k, x in enumerate(zs.positions, 1)])
    return data, f"{fam.label} n={cfg.n}: {cfg.n} zeros", 0


def _cmd_equilibrium(cfg: RunConfig):
    fam = cfg.polynomial_family()
    res = solve_equilibrium(cfg.n, field_for_family(fam), fam.interval)
    if cfg.format == "json":
        data = to_json({
            "subject": fam.label, "n": cfg.n, "positions": list(res.config.positions),
            "residual_norm": res.residual_norm, "iterations": res.iterations,
            "min_hessian_eigenvalue": res.min_hessian_eigenvalue, "stable": res.stable,
        })
    else:
        data = to_csv(["k", "x"], [{"k": k, "x": x} for k, x in enumerate(res.config.positions, 1)])
    summary = (f"{fam.label} n={cfg.n}: residual={res.residual_norm:.3e} "
               f"iterations={res.iterations} min_hess_eig={res.min_hessian_eigenvalue:.6g} "
               f"stable={res.stable}")
    return data, summary, 0


def _cmd_field(cfg: RunConfig):
    if cfg.family is not None:
        fam = cfg.polynomial_family()
        fld, subject = field_for_family(fam), fam.label
    else:
        model = cfg.quantum_model()
        if cfg.n is None:
            raise UsageError("field --model needs --n (the fitted field depends on the level)")
        fld, subject = model.level(cfg.n).field, f"{model.label} n={cfg.n}"
    rows = [{"term": "c0", "location": None, "strength": fld.c0},
            {"term": "c1", "location": None, "strength": fld.c1}]
    rows += [{"term": "pole", "location": s, "strength": r} for s, r in fld.poles]
    if cfg.format == "json":
        data = to_json({"subject": subject, "c0": fld.c0, "c1": fld.c1,
                        "poles": [list(p) for p in fld.poles]})
    else:
        data = to_csv(["term", "location", "strength"], rows)
    return data, f"field for {subject}: F(x) = {_field_text(fld)}", 0


def _field_text(fld) -> str:
    parts = [f"{fld.c0:g}", f"{fld.c1:g}*x"] + [f"{r:g}/(x - {s:g})" for s, r in fld.poles]
    return " + ".join(parts)


def _levels(cfg: RunConfig):
    if cfg.n_lo is not None:
        return list(range(cfg.n_lo, cfg.n_hi + 1))
    return [cfg.n]


def _cmd_spectrum(cfg: RunConfig):
    model = cfg.quantum_model()
    rows = [asdict(qhj.spectrum(model, n)) for n in _levels(cfg)]
    if cfg.format == "json":
        data = to_json({"subject": model.label, "levels": rows})
    else:
        data = to_csv(["n", "energy", "termination_rule"], rows)
    summary = "; ".join(f"E_{r['n']}={r['energy']:.12g}" for r in rows[:5])
    return data, f"{model.label}: {summary}", 0


def _cmd_riccati(cfg: RunConfig):
    model = cfg.quantum_model()
    xs = qhj.riccati_grid(model, cfg.n)
    res = qhj.riccati_residual(model, cfg.n, xs)
    rows = [{"x": float(x), "residual": float(r)} for x, r in zip(xs, res)]
    if cfg.format == "json":
        data = to_json({"subject": model.label, "n": cfg.n, "samples": rows})
    else:
        data = to_csv(["x", "residual"], rows)
    return data, f"{model.label} n={cfg.n}: max riccati residual {float(np.max(res)):.3e}", 0


def _cmd_quantize(cfg: RunConfig):
    model = cfg.quantum_model()
    j = qhj.action_integral(model, cfg.n, cfg.curve())
    if abs(j.imag) > 1e-9:
        raise NumericalError(f"action integral has imaginary part {j.imag:.3e}")
    row = {"n": cfg.n, "J": j.real, "J_imag": j.imag}
    data = to_json({"subject": model.label, **row}) if cfg.format == "json" else \
        to_csv(["n", "J", "J_imag"], [row])
    return data, f"J={j.real:.9f}", 0


def _cmd_nodes(cfg: RunConfig):
    model = cfg.quantum_model()
    zs = qhj.wavefunction_nodes(model, cfg.n)
    scale = model.level(cfg.n).scale
    rows = [{"k": k, "x": x, "x_polynomial": x * scale} for k, x in enumerate(zs.positions, 1)]
    if cfg.format == "json":
        data = to_json({"subject": model.label, "n": cfg.n, "scale": scale, "nodes": rows})
    else:
        data = to_csv(["k", "x", "x_polynomial"], rows)
    return data, f"{model.label} n={cfg.n}: {cfg.n} nodes", 0


def _emit_reports(reports, cfg: RunConfig, single: bool):
    if cfg.format == "json":
        data = reports[0].to_json() if single else \
            to_json([r.to_dict() for r in reports])
    else:
        data = to_csv(REPORT_COLUMNS, [_report_row(r) for r in reports])
    ok = all(r.passed for r in reports)
    lines = [f"{r.subject} n={r.n}: {'PASS' if r.passed else 'FAIL'}"
             + (f" ({r.message})" if r.message else "") for r in reports]
    return data, "\n".join(lines), 0 if ok else 1


def _cmd_verify(cfg: RunConfig):
    fam = cfg.polynomial_family()
    return _emit_reports([verify_family(fam, cfg.n, cfg.tol)], cfg, True)


def _cmd_verify_model(cfg: RunConfig):
    cfg.quantum_model()
    return _emit_reports([verify_model(cfg.model, cfg.l, cfg.n, cfg.tol)], cfg, True)


def _sweep_one(args):
    cfg, n = args
    if cfg.family is not None:
        return verify_family(cfg.polynomial_family(), n, cfg.tol)
    return verify_model(cfg.model, cfg.l, n, cfg.tol)


def _cmd_sweep(cfg: RunConfig):
    if cfg.family is not None:
        cfg.polynomial_family()
    else:
        cfg.quantum_model()
    work = [(cfg, n) for n in range(cfg.n_lo, cfg.n_hi + 1)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_sweep_one, work))
    else:
        reports = [_sweep_one(w) for w in work]
    data, _, code = _emit_reports(reports, cfg, False)
    failed = [r.n for r in reports if not r.passed]
    summary = f"sweep {reports[0].subject} n={cfg.n_lo}..{cfg.n_hi}: " + (
        "all pass" if not failed else f"failures at n={failed}")
    return data, summary, code


HANDLERS = {
    "zeros": _cmd_zeros,
    "equilibrium": _cmd_equilibrium,
    "field": _cmd_field,
    "spectrum": _cmd_spectrum,
    "riccati": _cmd_riccati,
    "quantize": _cmd_quantize,
    "nodes": _cmd_nodes,
    "verify": _cmd_verify,
    "verify-model": _cmd_verify_model,
    "sweep": _cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON RunConfig file; its values override flags")
    common.add_argument("--family", choices=["hermite", "laguerre", "jacobi"])
    common.add_argument("--m", type=float, help="Laguerre parameter (> -1)")
    common.add_argument("--p", type=float, help="Jacobi charge at x=1 (> 0)")
    common.add_argument("--q", type=float, help="Jacobi charge at x=-1 (> 0)")
    common.add_argument("--model", choices=["oscillator", "coulomb"])
    common.add_argument("--l", type=int, help="Coulomb angular momentum")
    common.add_argument("--n", type=int)
    common.add_argument("--n-lo", type=int)
    common.add_argument("--n-hi", type=int)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", help="output file, or '-' for standard output")
    common.add_argument("--center", type=float, help="contour centre (quantize)")
    common.add_argument("--semi-real", type=float, help="contour real semi-axis (quantize)")
    common.add_argument("--semi-imag", type=float, help="contour imaginary semi-axis (quantize)")
    common.add_argument("--points", type=int, help="contour sample count (quantize)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweep")

    parser = _Parser(prog="stieltjes", description=__doc__.split("\n")[0])
    parser.add_argument("--config", dest="top_config", help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in raw.items():
        k = key.replace("-", "_")
        if k not in known:
            raise UsageError(f"unknown config key {key!r}")
        out[k] = value
    return out


def parse_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    path = ns.pop("config", None) or ns.pop("top_config", None)
    ns.pop("top_config", None)
    values = {k: v for k, v in ns.items() if k in {f.name for f in fields(RunConfig)}}
    if path:
        values.update(_load_config(path))
    if not values.get("command"):
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _sink(cfg: RunConfig) -> Optional[str]:
    if cfg.output == "-":
        return None
    if cfg.output:
        return cfg.output
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        return os.path.join(out_dir, f"{cfg.command}.{cfg.format}")
    return None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = parse_config(list(sys.argv[1:] if argv is None else argv))
        data, summary, code = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    except NumericalError as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return 3
    path = _sink(cfg)
    if path is None:
        stdout.write(data)
        stderr.write(summary + "\n")
    else:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        stdout.write(summary + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
