"""Artifact writers: CSV emission, run manifests, and content hashing.

All floats are written with ``repr``, which round-trips in IEEE double and
keeps output bytes independent of locale, worker count, and numpy print
options.  The manifest lists every emitted file with its SHA-256 so that a
rerun can be compared hash for hash.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import RegimeReport, TimeSeries
from .model import ModelContext
from .overlaps import distinct_elements
from .sweep import EntropyCurve, FidelitySurface
from .units import ATOMIC_MASS_KG, HBAR_JS, PLANCK_H_JS

MODES_HEADER = "x_um,psi_s,psi_a,psi_L,psi_R"
TIMESERIES_HEADER = "tau,p_rr_b,p_rr_f"
FIDELITY_HEADER = "lambda_x,lambda_y,fidelity,degenerate_flag"
ENTROPY_HEADER = "lambda_ff,s_bosons,s_fermions,degenerate_flag"
ENTROPY_T_HEADER = "tau,s_bosons,s_fermions"


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_rows(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_modes_csv(path: str | Path, modes, grid) -> Path:
    path = Path(path)
    x = grid.points()
    rows = (
        (_fmt(x[k]), _fmt(modes.psi_s[k]), _fmt(modes.psi_a[k]),
         _fmt(modes.psi_left[k]), _fmt(modes.psi_right[k]))
        for k in range(x.size)
    )
    _write_rows(path, MODES_HEADER, rows)
    return path


def write_timeseries_csv(path: str | Path, series: TimeSeries) -> Path:
    path = Path(path)
    rows = (
        (_fmt(series.times[k]), _fmt(series.p_rr_bosons[k]), _fmt(series.p_rr_fermions[k]))
        for k in range(series.times.size)
    )
    _write_rows(path, TIMESERIES_HEADER, rows)
    return path


def write_fidelity_csv(path: str | Path, surface: FidelitySurface) -> Path:
    path = Path(path)
    rows = (
        (_fmt(surface.x_values[i]), _fmt(surface.y_values[j]),
         _fmt(surface.fidelity[i, j]), str(int(surface.degenerate[i, j])))
        for i in range(surface.x_values.size)
        for j in range(surface.y_values.size)
    )
    _write_rows(path, FIDELITY_HEADER, rows)
    return path


def write_entropy_csv(path: str | Path, curve: EntropyCurve) -> Path:
    path = Path(path)
    rows = (
        (_fmt(curve.lambda_ff[k]), _fmt(curve.s_bosons[k]),
         _fmt(curve.s_fermions[k]), str(int(curve.degenerate[k])))
        for k in range(curve.lambda_ff.size)
    )
    _write_rows(path, ENTROPY_HEADER, rows)
    return path


def write_entropy_timeseries_csv(path: str | Path, times, s_bosons, s_fermions) -> Path:
    path = Path(path)
    rows = (
        (_fmt(times[k]), _fmt(s_bosons[k]), _fmt(s_fermions[k]))
        for k in range(len(times))
    )
    _write_rows(path, ENTROPY_T_HEADER, rows)
    return path


def write_regimes_json(path: str | Path, report: RegimeReport) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(
    context: ModelContext,
    outputs: dict[str, Path],
    wall_times: dict[str, float] | None = None,
    results: dict | None = None,
) -> dict:
    """Everything needed to reproduce and check a run, in stable key order."""
    cfg = context.config
    flat_config = {
        k: (("true" if v else "false") if isinstance(v, bool) else v)
        for k, v in cfg.to_flat_dict().items()
    }
    mb, mf = context.boson_modes, context.fermion_modes
    manifest = {
        "tool": "dwmix",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": flat_config,
        "constants": {
            "hbar_js": HBAR_JS,
            "planck_h_js": PLANCK_H_JS,
            "atomic_mass_kg": ATOMIC_MASS_KG,
            "length_m": context.units.length_m,
            "energy_j": context.units.energy_j,
            "time_s": context.units.time_s,
            "kappa_boson": context.species.kappa_boson,
            "kappa_fermion": context.species.kappa_fermion,
        },
        "derived": {
            "omega_1_boson": mb.splitting,
            "omega_1_fermion": mf.splitting,
            "gap_ratio_boson": mb.gap_ratio,
            "gap_ratio_fermion": mf.gap_ratio,
            "right_mass_boson": mb.right_mass(),
            "right_mass_fermion": mf.right_mass(),
            "basis_labels": context.basis.labels,
            "boson_tensor": distinct_elements(context.overlaps.boson, pair_symmetric=True),
            "fermion_tensor": distinct_elements(context.overlaps.fermion, pair_symmetric=True),
            "cross_tensor": distinct_elements(context.overlaps.cross, pair_symmetric=False),
            "quadrature_error_boson": context.overlaps.boson.quadrature_error_estimate,
            "quadrature_error_fermion": context.overlaps.fermion.quadrature_error_estimate,
            "quadrature_error_cross": context.overlaps.cross.quadrature_error_estimate,
        },
        "results": results or {},
        "wall_time_s": {k: float(v) for k, v in (wall_times or {}).items()},
        "outputs": {
            name: {
                "path": path.name,
                "sha256": sha256_of(path),
                "bytes": path.stat().st_size,
            }
            for name, path in outputs.items()
        },
    }
    return manifest


def write_manifest(path: str | Path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n",
                    encoding="utf-8")
    return path


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__} in a manifest")
