"""Parameter sweeps over (mu_bar, sigma_bar) grids with CSV/JSON output.

A sweep evaluates the selected methods at every grid point, never aborting
on a per-point numerical failure (the row's status column records it), and
emits rows in mu_bar-major order.  Monte Carlo points derive independent
seeds from (master seed, row index), so output is byte-identical across
runs and worker counts.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .bounds import mir_bounds
from .errors import ConfigError, EmptySweep, MirError, ValidationError
from .mcsim import estimate_mir, simulate
from .mir import mir_discrete, mir_quadrature, mir_series
from .receptor import ReceptorSpec
from .truncgauss import TruncatedGaussianSpec

CSV_HEADER = (
    "mu_bar,sigma_bar,mu,sigma2,mir_quadrature,mir_series,lb_s2,ub_s2,"
    "lb_s4,ub_s4,mir_discrete,mc_value,mc_stderr,status"
)

VALID_METHODS = ("quadrature", "series", "bounds_s2", "bounds_s4", "discrete", "mc")


@dataclass(frozen=True)
class GridAxis:
    """Inclusive linear grid; a single-step axis degenerates to {min}."""

    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"grid steps must be >= 1, got {self.steps}")
        if self.steps == 1:
            if self.min > self.max:
                raise ConfigError(f"grid needs min <= max, got [{self.min}, {self.max}]")
        elif not self.min < self.max:
            raise ConfigError(
                f"grid needs min < max for steps > 1, got [{self.min}, {self.max}]"
            )

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    receptor: ReceptorSpec
    a: float
    b: float
    mu_bar_grid: GridAxis
    sigma_bar_grid: GridAxis
    methods: tuple[str, ...]
    series_k: int = 40
    delta_t: float = 1e-3
    mc_n: int = 10**6
    seed: int = 0
    quad_nodes: int = 200
    out_path: Optional[str] = None
    out_format: str = "csv"

    def __post_init__(self):
        for m in self.methods:
            if m not in VALID_METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {VALID_METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must not repeat")
        if "series" in self.methods:
            if self.b > 2.0:
                raise ConfigError("series requires b <= 2 (expansion convergence)")
            if self.a <= 0.0:
                raise ConfigError("series requires a > 0 (expansion convergence)")
            if not 2 <= self.series_k <= 64:
                raise ConfigError(f"series_k must be in [2, 64], got {self.series_k}")
        if self.quad_nodes < 1:
            raise ConfigError(f"quad_nodes must be >= 1, got {self.quad_nodes}")
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.out_format!r}")
        if self.delta_t <= 0.0:
            raise ConfigError(f"delta_t must be positive, got {self.delta_t}")
        if self.mc_n < 1:
            raise ConfigError(f"mc_n must be >= 1, got {self.mc_n}")


#: SweepRow float fields, in emission order.
_NUMERIC_FIELDS = (
    "mu_bar",
    "sigma_bar",
    "mu",
    "sigma2",
    "mir_quadrature",
    "mir_series",
    "lb_s2",
    "ub_s2",
    "lb_s4",
    "ub_s4",
    "mir_discrete",
    "mc_value",
    "mc_stderr",
)


@dataclass(frozen=True)
class SweepRow:
    mu_bar: float
    sigma_bar: float
    mu: Optional[float] = None
    sigma2: Optional[float] = None
    mir_quadrature: Optional[float] = None
    mir_series: Optional[float] = None
    lb_s2: Optional[float] = None
    ub_s2: Optional[float] = None
    lb_s4: Optional[float] = None
    ub_s4: Optional[float] = None
    mir_discrete: Optional[float] = None
    mc_value: Optional[float] = None
    mc_stderr: Optional[float] = None
    status: str = "ok"


def _derive_seed(master_seed: int, row_index: int) -> int:
    """Independent, order-free per-row stream key."""
    return int(np.random.SeedSequence([master_seed, row_index]).generate_state(1)[0])


def _compute_row(config: SweepConfig, index: int, mu_bar: float, sigma_bar: float) -> SweepRow:
    problems: list[str] = []
    values: dict = {}
    try:
        dist = TruncatedGaussianSpec(
            mu_bar=float(mu_bar), sigma_bar=float(sigma_bar), a=config.a, b=config.b
        )
    except ValidationError as exc:
        return SweepRow(
            mu_bar=float(mu_bar),
            sigma_bar=float(sigma_bar),
            status=f"distribution:{type(exc).__name__}:{exc}",
        )
    values["mu"] = dist.mu
    values["sigma2"] = dist.sigma2

    nodes = config.quad_nodes
    if "quadrature" in config.methods:
        try:
            values["mir_quadrature"] = mir_quadrature(
                config.receptor, dist, initial_nodes=nodes
            ).value
        except MirError as exc:
            problems.append(f"quadrature:{type(exc).__name__}")
    if "series" in config.methods:
        try:
            values["mir_series"] = mir_series(
                config.receptor, dist, config.series_k, initial_nodes=nodes
            ).value
        except MirError as exc:
            problems.append(f"series:{type(exc).__name__}")
    for s in (2, 4):
        if f"bounds_s{s}" in config.methods:
            try:
                pair = mir_bounds(config.receptor, dist, s)
                values[f"lb_s{s}"] = pair.lower
                values[f"ub_s{s}"] = pair.upper
            except MirError as exc:
                problems.append(f"bounds_s{s}:{type(exc).__name__}")
    if "discrete" in config.methods:
        try:
            values["mir_discrete"] = mir_discrete(
                config.receptor, dist, config.delta_t, initial_nodes=nodes
            ).value
        except MirError as exc:
            problems.append(f"discrete:{type(exc).__name__}")
    if "mc" in config.methods:
        try:
            traj = simulate(
                config.receptor,
                dist,
                config.delta_t,
                config.mc_n,
                _derive_seed(config.seed, index),
            )
            est = estimate_mir(traj, config.receptor, dist)
            values["mc_value"] = est.value
            values["mc_stderr"] = est.stderr
        except MirError as exc:
            problems.append(f"mc:{type(exc).__name__}")

    return SweepRow(
        mu_bar=float(mu_bar),
        sigma_bar=float(sigma_bar),
        status=";".join(problems) if problems else "ok",
        **values,
    )


def audit_rows(rows: Sequence[SweepRow]) -> list[tuple[int, str]]:
    """Check the bound-sandwich invariant on every fully populated row."""
    violations = []
    for i, row in enumerate(rows):
        if row.mir_quadrature is None:
            continue
        for s in (2, 4):
            lb = getattr(row, f"lb_s{s}")
            ub = getattr(row, f"ub_s{s}")
            if lb is not None and not (lb - 1e-9 <= row.mir_quadrature <= ub + 1e-9):
                violations.append(
                    (i, f"s={s} bounds [{lb}, {ub}] fail to sandwich {row.mir_quadrature}")
                )
    return violations


def run_sweep(config: SweepConfig, *, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows ordered mu_bar-major, then sigma_bar.

    Per-point numerical failures are recorded in the row status and never
    abort the sweep.  Rows are keyed by grid index, so the output does not
    depend on the execution order or worker count.
    """
    points = [
        (i * config.sigma_bar_grid.steps + j, mb, sb)
        for i, mb in enumerate(config.mu_bar_grid.values())
        for j, sb in enumerate(config.sigma_bar_grid.values())
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(lambda p: _compute_row(config, p[0], p[1], p[2]), points)
            )
    else:
        rows = [_compute_row(config, idx, mb, sb) for idx, mb, sb in points]

    for index, message in audit_rows(rows):
        row = rows[index]
        suffix = f"audit:{message}"
        status = suffix if row.status == "ok" else f"{row.status};{suffix}"
        rows[index] = replace(row, status=status)
    return rows


def find_capacity(rows: Sequence[SweepRow], by: str = "mir_quadrature"):
    """Grid argmax of one populated field.

    Returns (mu_bar, sigma_bar, value); exact-value ties break toward the
    smallest mu_bar, then the smallest sigma_bar.
    """
    if by not in _NUMERIC_FIELDS[4:]:
        raise ValidationError(f"cannot maximize over field {by!r}")
    if not rows:
        raise EmptySweep("no rows to maximize over")
    best = None
    for row in rows:
        value = getattr(row, by)
        if value is None:
            raise ValidationError(f"field {by!r} is not populated in every row")
        key = (-value, row.mu_bar, row.sigma_bar)
        if best is None or key < best[0]:
            best = (key, row)
    row = best[1]
    return row.mu_bar, row.sigma_bar, getattr(row, by)


def _format_cell(value) -> str:
    return "" if value is None else repr(float(value))


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    """Fixed-schema CSV; floats use shortest round-trip representation."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        cells = [_format_cell(getattr(row, name)) for name in _NUMERIC_FIELDS]
        cells.append(row.status)
        writer.writerow(cells)
    return buffer.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    """Inverse of rows_to_csv, field-for-field."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ValidationError(f"unexpected CSV header: {header}")
    rows = []
    for record in reader:
        if not record:
            continue
        if len(record) != len(_NUMERIC_FIELDS) + 1:
            raise ValidationError(f"malformed CSV record: {record}")
        kwargs = {
            name: (None if cell == "" else float(cell))
            for name, cell in zip(_NUMERIC_FIELDS, record)
        }
        rows.append(SweepRow(status=record[-1], **kwargs))
    return rows


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    """JSON array of row objects with the CSV field names; null for absents."""
    payload = [
        {name: getattr(row, name) for name in _NUMERIC_FIELDS} | {"status": row.status}
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def rows_from_json(text: str) -> list[SweepRow]:
    payload = json.loads(text)
    return [SweepRow(**entry) for entry in payload]


def write_rows(rows: Sequence[SweepRow], path, fmt: str = "csv") -> None:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
