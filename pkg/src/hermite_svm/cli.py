"""Command-line driver: ``run``, ``sweep``, ``compare`` and ``basis-check``.

Every option can come from a TOML file (``--config``) and be overridden on
the command line. With no options at all, ``run`` reproduces the
Sturm-Liouville viscosity experiment at N = 40, alpha = sqrt(2), T = 1.5.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .basis import BasisSpec, eval_basis
from .checks import BasisCheckConfig, run_basis_checks
from .diagnostics import (
    NormLabel,
    equidistant_grid,
    fit_growth,
    integrated_norms,
    norm_series,
    profile_errors,
)
from .reference import FVOracle, front_location, fv_reference
from .solver import BURGERS, ZERO_FLUX, IntegrationAborted, SchemeConfig, gaussian_profile, integrate
from .viscosity import ViscosityKind, ViscositySpec

log = logging.getLogger(__name__)

SCHEMES = tuple(k.value for k in ViscosityKind)
FLUXES = {"burgers": BURGERS, "zero": ZERO_FLUX}
DEFAULT_EPS_COEFF = {"none": 0.0, "high_mode_q": 0.5, "sturm_liouville": 0.05}
# integrated quantities reported per scheme, in table order
TABLE_COLUMNS = {
    "none": ("DxL2", "xL2", "L2"),
    "high_mode_q": ("DxL2", "xL2", "L2"),
    "sturm_liouville": ("DxL2", "L2", "x2L1"),
}


@dataclass
class RunConfig:
    scheme: str = "sturm_liouville"
    N: int = 40
    alpha: float = math.sqrt(2.0)
    eps_coeff: float | None = None
    eps_exp: float = -0.33
    m_coeff: float = 5.0
    m_exp: float = 0.16
    t_final: float = 1.5
    rel_tol: float = 1e-3
    abs_tol: float = 1e-6
    max_step: float | None = None
    flux: str = "burgers"
    sweep_Ns: list | None = None
    output_dir: str = "hsv_out"
    grid_L: float = 10.0
    grid_dx: float = 0.01
    oracle_cells: int = 20001
    front_halfwidth: float = 0.25
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.flux not in FLUXES:
            raise ValueError(f"flux must be one of {tuple(FLUXES)}, got {self.flux!r}")
        if self.eps_coeff is None:
            self.eps_coeff = DEFAULT_EPS_COEFF[self.scheme]
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a nonnegative integer, got {self.N}")
        self.N = int(self.N)
        if self.scheme == "high_mode_q" and self.N < 2:
            raise ValueError("the high-mode viscosity needs N >= 2")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.scheme != "none" and not self.eps_coeff > 0:
            raise ValueError("eps_coeff must be positive")
        if not self.t_final >= 0:
            raise ValueError("t_final must be nonnegative")
        for name in ("rel_tol", "abs_tol"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.grid_L <= 0 or self.grid_dx <= 0:
            raise ValueError("grid_L and grid_dx must be positive")
        if self.oracle_cells < 3 or self.oracle_cells % 2 == 0:
            raise ValueError("oracle_cells must be odd and >= 3")
        if self.sweep_Ns is not None:
            self.sweep_Ns = [int(n) for n in self.sweep_Ns]
            if any(n < 0 for n in self.sweep_Ns):
                raise ValueError("sweep_Ns must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def viscosity(self) -> ViscositySpec:
        if self.scheme == "none":
            return ViscositySpec.none()
        if self.scheme == "high_mode_q":
            return ViscositySpec.high_mode(self.eps_coeff, self.eps_exp, self.m_coeff, self.m_exp)
        return ViscositySpec.sturm_liouville(self.eps_coeff, self.eps_exp)

    def scheme_config(self, n: int | None = None) -> SchemeConfig:
        n = self.N if n is None else n
        return SchemeConfig(
            basis=BasisSpec(self.alpha, n),
            viscosity=self.viscosity(),
            flux=FLUXES[self.flux],
            t_final=self.t_final,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_step=self.max_step,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path: str | Path | None, overrides: dict) -> RunConfig:
    data = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


# ---- output helpers ---------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(path: Path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _output_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_test"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    return out


def reference_profile(cfg: RunConfig, x: np.ndarray) -> np.ndarray:
    """Reference solution at ``cfg.t_final`` sampled at ``x``."""
    if cfg.flux == "zero":
        return gaussian_profile(x)
    oracle = FVOracle(cfg.grid_L, cfg.oracle_cells, 0.45)
    return fv_reference(cfg.t_final, oracle)(x)


def _solve(cfg: RunConfig, n: int | None = None):
    """Integrate, turning an abort into a partial record plus message."""
    try:
        return integrate(cfg.scheme_config(n)), None
    except IntegrationAborted as exc:
        log.warning("integration aborted: %s", exc)
        return exc.record, str(exc)


def _summary(cfg: RunConfig, record, error) -> dict:
    return {
        "config": cfg.to_dict(),
        "status": record.status,
        "message": error or "",
        "t_reached": float(record.times[-1]),
        "accepted_steps": int(len(record.step_sizes)),
        "rejected_steps": int(record.n_rejected),
        "rhs_evaluations": int(record.nfev),
        "eps_N": cfg.scheme_config().eps,
        "integrated_norms": integrated_norms(record, cfg.grid_L, cfg.grid_dx),
        "final_coefficients": [float(v) for v in record.states[-1]],
    }


def cmd_run(cfg: RunConfig) -> dict:
    """Single run: ``profile.csv``, ``norms.csv``, ``summary.json``, ``runtime.json``."""
    out = _output_dir(cfg)
    record, error = _solve(cfg)
    x = equidistant_grid(cfg.grid_L, cfg.grid_dx)
    u_n = record.states[-1] @ eval_basis(record.spec, x)
    u_ref = reference_profile(cfg, x)
    write_csv(out / "profile.csv", ("x", "u_N", "u_ref"), zip(x, u_n, u_ref))
    series = [norm_series(record, lab, cfg.grid_L, cfg.grid_dx).values for lab in NormLabel]
    write_csv(out / "norms.csv", ("t", "norm_L2", "norm_Dx", "norm_x", "norm_x2_L1"),
              zip(record.times, *series))
    summary = _summary(cfg, record, error)
    write_json(out / "summary.json", summary)
    write_json(out / "runtime.json", {"wall_clock_seconds": record.wall_clock})
    if error:
        raise IntegrationAborted(error, record)
    return summary


def _sweep_row(args):
    cfg, n = args
    record, error = _solve(cfg, n)
    if error:
        return {"N": n, "status": "failed", "message": error}
    norms = integrated_norms(record, cfg.grid_L, cfg.grid_dx)
    return {"N": n, "status": "ok", "message": "", **norms}


def sweep_rows(cfg: RunConfig) -> list[dict]:
    ns = cfg.sweep_Ns or []
    if len(ns) < 2:
        raise ValueError("a sweep needs at least two values of N")
    tasks = [(cfg, n) for n in ns]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_sweep_row, tasks))
    return [_sweep_row(t) for t in tasks]


def growth_exponents(rows: list[dict], columns) -> dict:
    good = [r for r in rows if r["status"] == "ok"]
    out = {}
    for col in columns:
        pts = [(r["N"], r[col]) for r in good if r[col] > 0]
        if len(pts) >= 2:
            fit = fit_growth(pts)
            out[col] = {"exponent": fit.exponent, "prefactor": fit.prefactor, "residual": fit.residual}
    return out


def cmd_sweep(cfg: RunConfig) -> dict:
    """N-sweep: ``table.csv`` and ``growth.json``."""
    out = _output_dir(cfg)
    rows = sweep_rows(cfg)
    cols = TABLE_COLUMNS[cfg.scheme]
    write_csv(out / "table.csv", ("N", "status", *cols),
              [(r["N"], r["status"], *(r.get(c, "") for c in cols)) for r in rows])
    growth = growth_exponents(rows, cols)
    write_json(out / "growth.json", {"config": cfg.to_dict(), "exponents": growth,
                                     "failed": [r["N"] for r in rows if r["status"] != "ok"]})
    return {"rows": rows, "growth": growth}


def compare_errors(cfg: RunConfig, record) -> dict:
    x = equidistant_grid(cfg.grid_L, cfg.grid_dx)
    u_n = record.states[-1] @ eval_basis(record.spec, x)
    u_ref = reference_profile(cfg, x)
    front = front_location(x, u_ref) if cfg.flux == "burgers" else None
    return profile_errors(x, u_n, u_ref, front, cfg.front_halfwidth)


def cmd_compare(cfg: RunConfig) -> dict:
    """Distance to the reference solution: ``errors.json``."""
    out = _output_dir(cfg)
    record, error = _solve(cfg)
    report = {"config": cfg.to_dict(), "status": record.status, "message": error or "",
              **compare_errors(cfg, record)}
    write_json(out / "errors.json", report)
    if error:
        raise IntegrationAborted(error, record)
    return report


def cmd_basis_check(check_cfg: BasisCheckConfig) -> int:
    results = run_basis_checks(check_cfg)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


# ---- argument parsing -------------------------------------------------------

def _parse_ns(text: str) -> list[int]:
    """``40,45,50`` or ``40:70:5`` (inclusive stop)."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _add_run_options(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML file with RunConfig keys")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--N", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps-coeff", dest="eps_coeff", type=float)
    p.add_argument("--eps-exp", dest="eps_exp", type=float)
    p.add_argument("--m-coeff", dest="m_coeff", type=float)
    p.add_argument("--m-exp", dest="m_exp", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--max-step", dest="max_step", type=float)
    p.add_argument("--flux", choices=tuple(FLUXES))
    p.add_argument("--sweep-Ns", dest="sweep_Ns", type=_parse_ns,
                   help="comma list or start:stop:step (inclusive)")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-dx", dest="grid_dx", type=float)
    p.add_argument("--oracle-cells", dest="oracle_cells", type=int)
    p.add_argument("--front-halfwidth", dest="front_halfwidth", type=float)
    p.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermite-svm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "single run"), ("sweep", "N-sweep with growth fits"),
                       ("compare", "error report against the reference solution")):
        _add_run_options(sub.add_parser(name, help=text))
    bc = sub.add_parser("basis-check", help="basis, quadrature and operator checks")
    bc.add_argument("--alphas", type=lambda s: tuple(float(v) for v in s.split(",")))
    bc.add_argument("--n-values", dest="n_values", type=lambda s: tuple(int(v) for v in s.split(",")))
    bc.add_argument("--node-deficit", dest="node_deficit", type=int, default=0,
                    help="drop this many quadrature nodes (negative test)")
    return parser


_RUN_KEYS = {f.name for f in fields(RunConfig)}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "basis-check":
        kw = {k: getattr(args, k) for k in ("alphas", "n_values") if getattr(args, k) is not None}
        return cmd_basis_check(BasisCheckConfig(node_deficit=args.node_deficit, **kw))
    overrides = {k: v for k, v in vars(args).items() if k in _RUN_KEYS}
    try:
        cfg = load_config(args.config, overrides)
    except (ValueError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            summary = cmd_run(cfg)
            print(json.dumps(summary["integrated_norms"], indent=2, sort_keys=True))
        elif args.command == "sweep":
            result = cmd_sweep(cfg)
            for row in result["rows"]:
                print(row)
            print(json.dumps(result["growth"], indent=2, sort_keys=True))
        else:
            report = cmd_compare(cfg)
            print(json.dumps({k: v for k, v in report.items() if k != "config"}, indent=2, sort_keys=True))
    except IntegrationAborted as exc:
        print(f"error: integration aborted: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
