"""Parameter-plane and parameter-line scans over coupling space.

A sweep evaluates the interacting ground state cell by cell over a coupling
grid, against fixed single-particle inputs (modes and overlap tensors are
computed once and shared read-only).  Output order is row-major over the
grid regardless of how many workers computed it, so CSV bytes do not depend
on the schedule.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SweepError
from .manybody import CouplingParams, HamiltonianBlocks, ground_state
from .observables import species_entropies

# plane tag -> (x axis coupling, y axis coupling, fixed couplings)
PLANE_AXES: dict[str, tuple[str, str | None, tuple[str, ...]]] = {
    "ff_bf": ("lambda_ff", "lambda_bf", ("lambda_bb",)),
    "bb_bf": ("lambda_bb", "lambda_bf", ("lambda_ff",)),
    "bb_ff": ("lambda_bb", "lambda_ff", ("lambda_bf",)),
    "line_ff": ("lambda_ff", None, ("lambda_bb", "lambda_bf")),
}

_ALL_COUPLINGS = ("lambda_bb", "lambda_ff", "lambda_bf")


@dataclass(frozen=True)
class AxisSpec:
    """One linearly spaced sweep axis."""

    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError("axis resolution must be at least 1")
        if self.stop < self.start:
            raise ConfigError("axis range must have stop >= start")
        if self.stop == self.start and self.count > 1:
            raise ConfigError("degenerate axis range needs resolution 1")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start], dtype=float)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Which plane to scan, over what ranges, with what held fixed."""

    plane: str
    x_axis: AxisSpec
    y_axis: AxisSpec | None = None
    fixed: dict[str, float] | None = None
    reference: CouplingParams | None = None

    def __post_init__(self) -> None:
        if self.plane not in PLANE_AXES:
            raise ConfigError(f"unknown sweep plane {self.plane!r}")
        x_name, y_name, fixed_names = PLANE_AXES[self.plane]
        if (y_name is None) != (self.y_axis is None):
            raise ConfigError(
                f"plane {self.plane!r} "
                + ("takes no y axis" if y_name is None else "needs a y axis")
            )
        fixed = dict(self.fixed or {})
        if set(fixed) != set(fixed_names):
            raise ConfigError(
                f"plane {self.plane!r} must fix exactly {sorted(fixed_names)}, "
                f"got {sorted(fixed)}"
            )
        axis_names = {x_name} | ({y_name} if y_name else set())
        if axis_names | set(fixed) != set(_ALL_COUPLINGS):
            raise ConfigError("axes plus fixed couplings must cover all three couplings")
        object.__setattr__(self, "fixed", fixed)

    def couplings_at(self, x_value: float, y_value: float | None) -> CouplingParams:
        x_name, y_name, _ = PLANE_AXES[self.plane]
        values = dict(self.fixed)
        values[x_name] = float(x_value)
        if y_name is not None:
            values[y_name] = float(y_value)
        return CouplingParams(**values)


@dataclass(frozen=True)
class FidelitySurface:
    x_values: np.ndarray
    y_values: np.ndarray
    fidelity: np.ndarray  # shape (len(x), len(y))
    degenerate: np.ndarray  # bool, same shape
    reference: CouplingParams
    reference_energy: float
    wall_time_s: float


@dataclass(frozen=True)
class EntropyCurve:
    lambda_ff: np.ndarray
    s_bosons: np.ndarray
    s_fermions: np.ndarray
    degenerate: np.ndarray
    wall_time_s: float

    @property
    def argmax_lambda(self) -> float:
        return float(self.lambda_ff[int(np.argmax(self.s_bosons))])


_WORKER_BLOCKS: HamiltonianBlocks | None = None
_WORKER_REF: np.ndarray | None = None


def _init_worker(blocks: HamiltonianBlocks, reference: np.ndarray | None) -> None:
    global _WORKER_BLOCKS, _WORKER_REF
    _WORKER_BLOCKS = blocks
    _WORKER_REF = reference


def _fidelity_cell(task: tuple[int, float, float, float]) -> tuple[int, float, bool, str]:
    index, lbb, lff, lbf = task
    try:
        gs = ground_state(_WORKER_BLOCKS.compose(CouplingParams(lbb, lff, lbf)))
        value = float(abs(np.vdot(_WORKER_REF, gs.state.coefficients)))
        value = min(value, 1.0)
        return index, value, gs.degenerate, ""
    except Exception as exc:  # propagated as SweepError with the cell named
        return index, np.nan, False, f"{type(exc).__name__}: {exc}"


def _entropy_cell(task: tuple[int, float, float, float]) -> tuple[int, float, float, bool, str]:
    index, lbb, lff, lbf = task
    try:
        gs = ground_state(_WORKER_BLOCKS.compose(CouplingParams(lbb, lff, lbf)))
        ent = species_entropies(gs.state)
        return index, ent.s_bosons, ent.s_fermions, gs.degenerate, ""
    except Exception as exc:
        return index, np.nan, np.nan, False, f"{type(exc).__name__}: {exc}"


def _run_tasks(tasks, cell_fn, blocks, reference, workers):
    """Evaluate cells in submission order, serially or on a process pool."""
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if workers == 1:
        _init_worker(blocks, reference)
        return [cell_fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(blocks, reference)
    ) as pool:
        return list(pool.map(cell_fn, tasks, chunksize=chunk))


def fidelity_map(
    blocks: HamiltonianBlocks, spec: SweepSpec, workers: int = 1
) -> FidelitySurface:
    """Ground-state fidelity against the reference over a coupling plane."""
    if spec.reference is None:
        raise ConfigError("fidelity sweeps need reference couplings")
    started = time.perf_counter()
    ref_gs = ground_state(blocks.compose(spec.reference))
    ref = ref_gs.state.coefficients
    xs = spec.x_axis.values()
    ys = spec.y_axis.values() if spec.y_axis is not None else np.array([0.0])
    tasks = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            p = spec.couplings_at(x, y if spec.y_axis is not None else None)
            tasks.append((i * len(ys) + j, p.lambda_bb, p.lambda_ff, p.lambda_bf))
    results = _run_tasks(tasks, _fidelity_cell, blocks, ref, workers)
    fid = np.empty((len(xs), len(ys)))
    degen = np.zeros((len(xs), len(ys)), dtype=bool)
    for index, value, is_degen, error in results:
        i, j = divmod(index, len(ys))
        if error:
            raise SweepError(
                f"fidelity sweep failed at cell ({i}, {j}), "
                f"x={xs[i]!r}, y={ys[j]!r}: {error}"
            )
        fid[i, j] = value
        degen[i, j] = is_degen
    return FidelitySurface(
        x_values=xs,
        y_values=ys,
        fidelity=fid,
        degenerate=degen,
        reference=spec.reference,
        reference_energy=ref_gs.energy,
        wall_time_s=time.perf_counter() - started,
    )


def entropy_scan(
    blocks: HamiltonianBlocks, spec: SweepSpec, workers: int = 1
) -> EntropyCurve:
    """Species entanglement entropies of the ground state along a line."""
    if spec.plane != "line_ff":
        raise ConfigError("entropy scans run on the 'line_ff' plane")
    started = time.perf_counter()
    xs = spec.x_axis.values()
    tasks = []
    for i, x in enumerate(xs):
        p = spec.couplings_at(x, None)
        tasks.append((i, p.lambda_bb, p.lambda_ff, p.lambda_bf))
    results = _run_tasks(tasks, _entropy_cell, blocks, None, workers)
    sb = np.empty(len(xs))
    sf = np.empty(len(xs))
    degen = np.zeros(len(xs), dtype=bool)
    for index, s_bosons, s_fermions, is_degen, error in results:
        if error:
            raise SweepError(
                f"entropy scan failed at point {index}, "
                f"lambda_ff={xs[index]!r}: {error}"
            )
        sb[index] = s_bosons
        sf[index] = s_fermions
        degen[index] = is_degen
    return EntropyCurve(
        lambda_ff=xs,
        s_bosons=sb,
        s_fermions=sf,
        degenerate=degen,
        wall_time_s=time.perf_counter() - started,
    )


def run_parallel(blocks: HamiltonianBlocks, spec: SweepSpec, workers: int = 1):
    """Route a spec to the right scan; same outputs for any worker count."""
    if spec.plane == "line_ff":
        return entropy_scan(blocks, spec, workers=workers)
    return fidelity_map(blocks, spec, workers=workers)
