"""Experiment orchestration: build operators from a config, run checks, write CSV + manifest."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import ExperimentConfig, serialize_config
from .grid import PeriodicGrid, SpectralVector
from .lift import ItoCheck, LiftedField, ShearMap, default_fiber_period, duhamel_residual, ito_transform
from .operator import hermitian_defect
from .quantization import compose_l
from .semigroup import cutoff_convergence
from .symbols import builtin_symbol, ellipticity_constant, symbol_estimate_report
from .trig import TrigPolynomial

CONVENTIONS = (
    "quantization: left, (L0 u)(x_j) = sum_k a(x_j, k/P) u_hat(k) exp(2 pi i k x_j / P)",
    "dft: u_hat(k) = (1/N) sum_j u(x_j) exp(-2 pi i k x_j / P)",
    "generator: L = L0^* L0 (positive); semigroup P_t = exp(-t L)",
    "series: sum_{n<=K} (-t)^n L^n / n!, scaling and squaring until t||L||_2 <= 1",
    "transform: L_hat = S_{-f} (L (x) I) S_{+f}, shear applied as fiber-Fourier modulation",
    "graph trace: fiber trigonometric interpolant evaluated at y = f(x)",
    "symbol estimates: weight (1 + xi^2)^{(m-k')/2} in place of |xi|^{m-k'}",
    "variation of constants: P_t - P_lam,t = int_0^t P_lam,t-s (L_lam - L) P_s ds",
    "fiber period: 4 max|f| unless configured",
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass
class RunResult:
    csv_path: Path
    manifest_path: Path
    checks: list
    summary: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def _le(name, value, threshold, detail=""):
    return Check(name, float(value), float(threshold), bool(value <= threshold), detail)


def _ge(name, value, threshold, detail=""):
    return Check(name, float(value), float(threshold), bool(value >= threshold), detail)


def _symbol(config: ExperimentConfig):
    params = config.params
    if config.symbol_name in ("variable_bessel", "vector_field"):
        params.setdefault("period", config.grid_period)
    return builtin_symbol(config.symbol_name, params)


def _pairs(config: ExperimentConfig, base: PeriodicGrid):
    """(f, v) pairs: the configured one, or ``samples`` random band-limited draws."""
    P = base.period
    if config.f_coeffs is not None:
        f_polys = [TrigPolynomial(config.f_coeffs, P)]
    else:
        rng = np.random.default_rng(config.seed)
        f_polys = [TrigPolynomial.random(rng, 2, P, 0.3) for _ in range(config.samples)]
    rng_v = np.random.default_rng(config.seed + 1)
    out = []
    for fp in f_polys:
        fvals = fp(base.nodes)
        Y = config.fiber_period or default_fiber_period(fvals)
        shear = ShearMap(fvals, PeriodicGrid(config.fiber_m, Y))
        px = TrigPolynomial(config.v_coeffs, P) if config.v_coeffs else TrigPolynomial.random(rng_v, 2, P)
        py = TrigPolynomial(config.v_fiber_coeffs, Y) if config.v_fiber_coeffs else TrigPolynomial.random(rng_v, 2, Y)
        out.append((shear, LiftedField.separable(px, py, base, shear.fiber_grid)))
    return out


def _ito_verify(config, a, base):
    rows, checks = [], []
    tol = config.tolerance("ito_residual")
    lam = config.lambdas[-1] if config.lambdas else None
    for i, (shear, v) in enumerate(_pairs(config, base)):
        check = ItoCheck(a, shear, v, config.method, lam, config.series_k)
        scale = max(1.0, float(np.max(np.abs(v.values))))
        for t in config.times:
            rmax, rl2 = check.residual(t)
            rows.append([i, t, rmax, rl2])
            checks.append(_le(f"ito_residual[sample={i},t={t!r}]", rmax, tol * scale))
        L_hat = check.L_hat
        herm = hermitian_defect(L_hat.entries)
        checks.append(
            _le(f"hermitian[sample={i}]", herm, config.tolerance("hermitian") * (1 + L_hat.norm()))
        )
        ev = L_hat.eigvalsh()
        checks.append(_ge(f"psd[sample={i}]", ev[0], -config.tolerance("psd") * ev[-1]))
    return ["sample", "t", "residual_max", "residual_l2"], rows, checks, {}


def _u_vector(config, base):
    if config.u_coeffs is not None:
        return TrigPolynomial(config.u_coeffs, base.period)(base.nodes).astype(complex)
    k0 = 3 if config.u_mode is None else config.u_mode
    return base.mode(k0)


def _cutoff_convergence(config, a, base):
    lams = config.lambdas or tuple(base.xi_max * s for s in (0.125, 0.25, 0.5, 1.0))
    u = SpectralVector(_u_vector(config, base))
    table = cutoff_convergence(a, base, lams, u, config.times)
    header = ["lambda", "l0_l2", "l0_max", "adjoint_l2", "adjoint_max"]
    for t in config.times:
        header += [f"pt_l2[t={t!r}]", f"pt_max[t={t!r}]"]
    rows, checks = [], []
    tol = config.tolerance("cutoff_inactive")
    for lam, row in table.items():
        vals = [row.l0_l2, row.l0_max, row.adjoint_l2, row.adjoint_max]
        for t in config.times:
            vals += list(row.semigroup[float(t)])
        rows.append([lam] + vals)
        if lam >= base.xi_max:
            checks.append(_le(f"cutoff_inactive[lambda={lam!r}]", max(vals), tol))
    return header, rows, checks, {"xi_max": base.xi_max}


def _spectrum(config, a, base):
    L = compose_l(a, base)
    ev = L.eigvalsh()
    checks = [
        _le("hermitian", hermitian_defect(L.entries), config.tolerance("hermitian") * (1 + L.norm())),
        _ge("psd", ev[0], -config.tolerance("psd") * ev[-1]),
    ]
    if config.f_coeffs is not None:
        shear, _ = _pairs(config, base)[0]
        lifted = ito_transform(L, shear).eigvalsh()
        expected = np.repeat(ev, config.fiber_m)
        rel = float(np.max(np.abs(lifted - expected)) / max(1.0, abs(ev[-1])))
        checks.append(_le("spectrum_invariance", rel, config.tolerance("spectrum_invariance")))
    rows = [[i, float(e)] for i, e in enumerate(ev)]
    return ["index", "eigenvalue"], rows, checks, {}


def _duhamel(config, a, base):
    lams = config.lambdas or (base.xi_max / 2, base.xi_max)
    shear, v = _pairs(config, base)[0]
    rows, checks = [], []
    steps = sorted(config.duhamel_steps)
    inactive = config.tolerance("duhamel_inactive")
    for lam in lams:
        for t in config.times:
            res = [duhamel_residual(a, shear, v, t, lam, n) for n in steps]
            rows += [[lam, t, n, r] for n, r in zip(steps, res)]
            if lam >= base.xi_max or t == 0:
                checks.append(_le(f"duhamel_inactive[lambda={lam!r},t={t!r}]", max(res), inactive))
                continue
            for (n0, r0), (n1, r1) in zip(zip(steps, res), zip(steps[1:], res[1:])):
                if r0 <= inactive:
                    continue
                checks.append(
                    _ge(f"duhamel_ratio[lambda={lam!r},t={t!r},{n0}->{n1}]", r0 / r1, config.tolerance("duhamel_ratio"))
                )
    return ["lambda", "t", "n_steps", "residual"], rows, checks, {"xi_max": base.xi_max}


def _symbol_check(config, a, base):
    rep = symbol_estimate_report(a, base, config.estimate_k_max, config.estimate_kp_max)
    fine = symbol_estimate_report(a, base, config.estimate_k_max, config.estimate_kp_max, oversample=2)
    rows, checks = [], []
    tol = config.tolerance("estimate_stability")
    for (k, kp), c in sorted(rep.constants.items()):
        c2 = fine.constants[(k, kp)]
        rows.append([k, kp, c, c2])
        rel = abs(c2 - c) / max(abs(c), 1e-300) if c2 != c else 0.0
        # constants at rounding level carry no relative information
        if max(c, c2) > max(rep.rounding_floor[(k, kp)], fine.rounding_floor[(k, kp)]):
            checks.append(_le(f"estimate_stability[k={k},k'={kp}]", rel, tol))
    ell = ellipticity_constant(a, base, config.ellipticity_threshold)
    return ["k", "kp", "constant", "constant_oversampled"], rows, checks, {
        "ellipticity_constant": ell,
        "sample": rep.sample,
    }


_RUNNERS = {
    "ito_verify": _ito_verify,
    "cutoff_convergence": _cutoff_convergence,
    "spectrum": _spectrum,
    "duhamel": _duhamel,
    "symbol_check": _symbol_check,
}


def manifest_path_for(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def run_experiment(config: ExperimentConfig, output_dir: Optional[os.PathLike] = None) -> RunResult:
    """
    Run one experiment; write its CSV table and a JSON manifest next to it.

    The manifest records the fully resolved configuration (as reparseable
    text), the tolerances, the outcome of every check and the numerical
    conventions in force.
    """
    base = PeriodicGrid(config.grid_n, config.grid_period)
    a = _symbol(config)
    header, rows, checks, summary = _RUNNERS[config.experiment](config, a, base)

    csv_path = Path(config.csv_path)
    if output_dir is not None:
        csv_path = Path(output_dir) / csv_path.name
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])

    manifest = {
        "package_version": __version__,
        "experiment": config.experiment,
        "config_text": serialize_config(config),
        "config": asdict(config),
        "seed": config.seed,
        "tolerances": config.resolved_tolerances(),
        "conventions": list(CONVENTIONS),
        "csv": csv_path.name,
        "summary": summary,
        "checks": [asdict(c) for c in checks],
        "passed": all(c.passed for c in checks),
    }
    mpath = manifest_path_for(csv_path)
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return RunResult(csv_path, mpath, checks, summary)
