"""Parameter sweeps, power-law fits, and CSV emission.

Three sweep modes mirror the standard numerical settings: a separation
sweep with single-site groups (setting1), a measured-block-size sweep
against the antipodal target (setting2), and a system-size sweep at the
maximal block ell = N/2 - 2 (size-sweep).  Rows are pure functions of the
configuration, evaluated optionally in a thread pool but always merged in
grid order, and floats are serialized with 12 significant digits so that
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .chain_model import ChainParams
from .qet_protocol import run_setting1, run_setting2

ALPHA_PRESETS = {
    "a1": 0.90,
    "a2": 0.95,
    "a3": 0.99,
    "a4": 1.0 - 1e-7,
}

MODES = ("setting1", "setting2", "size-sweep", "validate")

DEFAULT_N_LIST = tuple(range(20, 101, 10))


def resolve_alpha(value) -> float:
    """Coupling from a preset name (a1..a4) or a numeric literal."""
    if isinstance(value, str):
        text = value.strip()
        if text in ALPHA_PRESETS:
            return ALPHA_PRESETS[text]
        try:
            return float(text)
        except ValueError:
            raise ValueError(f"alpha must be a preset {sorted(ALPHA_PRESETS)} or a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    """One sweep invocation: mode, model parameters, grid bounds, fit window."""

    mode: str
    n_sites: int = 100
    alpha: float = ALPHA_PRESETS["a4"]
    omega: float = 1.0
    d_max: int = 40
    ell_min: int | None = None
    ell_max: int | None = None
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    fit_min: float | None = None
    fit_max: float | None = None
    out: str | None = None
    seed: int = 1
    threads: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.threads < 0:
            raise ValueError(f"threads must be >= 0, got {self.threads}")
        if self.d_max < 0:
            raise ValueError(f"d-max must be >= 0, got {self.d_max}")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))

    def params(self, n_sites: int | None = None) -> ChainParams:
        return ChainParams(n_sites=n_sites or self.n_sites, alpha=self.alpha, omega=self.omega)


@dataclass(frozen=True)
class SweepTable:
    """Column names plus rows in grid order; the CSV payload."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])


@dataclass(frozen=True)
class PowerLawFit:
    """y ~ amplitude * x^exponent (+ offset), with the fit window recorded."""

    amplitude: float
    exponent: float
    offset: float | None
    r_squared: float
    window: tuple[float, float]


def _map_ordered(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = threads if threads > 0 else min(len(items), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep_setting1(config: RunConfig) -> SweepTable:
    """One row per separation d = 0..d_max for single-site groups."""
    params = config.params()
    if config.d_max + 1 >= params.n_sites:
        raise ValueError(f"d-max {config.d_max} does not fit on a ring of {params.n_sites} sites")

    def row(d: int) -> tuple:
        rep = run_setting1(params, d)
        return (
            d,
            rep.optimized_energy,
            rep.e_n_before,
            rep.e_n_after,
            rep.delta_log_negativity,
            rep.s_m_before,
            rep.s_m_after,
            rep.delta_mutual_information,
        )

    rows = _map_ordered(row, range(config.d_max + 1), config.threads)
    return SweepTable(
        columns=("d", "E_B_opt", "E_N_before", "E_N_after", "delta_E_N",
                 "S_M_before", "S_M_after", "delta_S_M"),
        rows=tuple(rows),
    )


def sweep_setting2(config: RunConfig) -> SweepTable:
    """One row per measured-block half-width ell."""
    params = config.params()
    top = params.n_sites // 2 - 2
    lo = 1 if config.ell_min is None else config.ell_min
    hi = top if config.ell_max is None else config.ell_max
    if not 1 <= lo <= hi <= top:
        raise ValueError(f"ell range [{lo}, {hi}] must lie within [1, {top}]")

    def row(ell: int) -> tuple:
        rep = run_setting2(params, ell)
        delta = rep.delta_log_negativity
        e_abs = abs(rep.optimized_energy)
        return (ell, delta, e_abs, e_abs / delta)

    rows = _map_ordered(row, range(lo, hi + 1), config.threads)
    return SweepTable(columns=("ell", "delta_E_N", "E_B_abs", "ratio"), rows=tuple(rows))


def sweep_size(config: RunConfig) -> SweepTable:
    """One row per system size N, each at the maximal block ell = N/2 - 2."""
    for n in config.n_list:
        if n < 6 or n % 2 != 0:
            raise ValueError(f"size sweep needs even N >= 6, got {n}")

    def row(n: int) -> tuple:
        rep = run_setting2(config.params(n_sites=n), n // 2 - 2)
        delta = rep.delta_log_negativity
        e_abs = abs(rep.optimized_energy)
        return (n, delta, e_abs, e_abs / delta)

    rows = _map_ordered(row, config.n_list, config.threads)
    return SweepTable(columns=("N", "delta_E_N", "E_B_abs", "beta"), rows=tuple(rows))


def fit_power_law(points: Sequence[tuple[float, float]], with_offset: bool = False) -> PowerLawFit:
    """Least-squares power law on log-log axes.

    Without offset: straight line through (ln x, ln y).  With offset: the
    tail (last 10% of points by x, at least one) estimates the additive
    floor as its mean y; the remaining points are fit after subtracting it.
    Raises ValueError when any residual to be logged is non-positive.
    """
    pts = sorted((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(x <= 0):
        raise ValueError("abscissae must be positive")
    window = (float(x[0]), float(x[-1]))

    offset = None
    if with_offset:
        tail = max(1, round(0.1 * len(pts)))
        offset = float(np.mean(y[-tail:]))
        x, y = x[:-tail], y[:-tail] - offset
    if np.any(y <= 0):
        raise ValueError("non-positive values after offset subtraction; fit aborted")

    lx, ly = np.log(x), np.log(y)
    design = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    residual = ly - design @ coef
    total = np.sum((ly - ly.mean()) ** 2)
    if total > 0:
        r_squared = float(1.0 - np.sum(residual**2) / total)
    else:
        r_squared = 1.0 if np.sum(residual**2) < 1e-20 else 0.0
    return PowerLawFit(
        amplitude=float(np.exp(coef[1])),
        exponent=float(coef[0]),
        offset=offset,
        r_squared=r_squared,
        window=window,
    )


def _window_points(table: SweepTable, x_col: str, y: np.ndarray, lo: float, hi: float):
    x = table.column(x_col).astype(float)
    keep = (x >= lo) & (x <= hi) & (x > 0)
    return list(zip(x[keep], y[keep]))


def summary_fits(config: RunConfig, table: SweepTable) -> list[tuple[str, PowerLawFit | str]]:
    """Named fits for the sweep, or a reason string when a fit is not defined."""
    out: list[tuple[str, PowerLawFit | str]] = []
    if config.mode == "setting1":
        lo = 10.0 if config.fit_min is None else config.fit_min
        hi = 40.0 if config.fit_max is None else config.fit_max
        for name, y in (("E_B_abs", np.abs(table.column("E_B_opt"))),
                        ("delta_S_M", table.column("delta_S_M"))):
            try:
                out.append((name, fit_power_law(_window_points(table, "d", y, lo, hi))))
            except ValueError as exc:
                out.append((name, f"aborted: {exc}"))
    elif config.mode == "size-sweep":
        lo = 40.0 if config.fit_min is None else config.fit_min
        hi = float(max(config.n_list)) if config.fit_max is None else config.fit_max
        specs = (("delta_E_N", table.column("delta_E_N"), False),
                 ("E_B_abs", table.column("E_B_abs"), True),
                 ("beta", table.column("beta"), False))
        for name, y, with_offset in specs:
            try:
                out.append((name, fit_power_law(_window_points(table, "N", y, lo, hi), with_offset)))
            except ValueError as exc:
                out.append((name, f"aborted: {exc}"))
    return out


def format_value(value) -> str:
    """Serialize one CSV cell: integers verbatim, floats at 12 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    number = float(value)
    if number == 0.0:
        number = 0.0  # never emit "-0"
    return format(number, ".12g")


def render_csv(table: SweepTable) -> str:
    lines = [",".join(table.columns)]
    lines.extend(",".join(format_value(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def write_csv(table: SweepTable, path: str) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(render_csv(table))


def render_fit_lines(fits: list[tuple[str, PowerLawFit | str]]) -> list[str]:
    """One line per fit: quantity amplitude exponent offset r2 window."""
    lines = []
    for name, fit in fits:
        if isinstance(fit, str):
            lines.append(f"{name} {fit}")
            continue
        offset = "-" if fit.offset is None else format_value(fit.offset)
        lines.append(
            f"{name} {format_value(fit.amplitude)} {format_value(fit.exponent)} "
            f"{offset} {format_value(fit.r_squared)} {format_value(fit.window[0])}..{format_value(fit.window[1])}"
        )
    return lines
