"""Graph and rates file parsing plus the shared sweep CSV schema.

Class labels in files are 1-based (as in the graph drawings the fixtures
come from); the library is 0-based. Translation happens here and nowhere
else.

Graph, text form: first data line is the number of classes, every further
line one edge ``i j``; ``#`` starts a comment. JSON form: an object
``{"n": N, "edges": [[i, j], ...]}``. Both parse to identical graphs.

Rates: one real per line, or a JSON array. Any positive vector is accepted
and normalized; a warning is emitted when the total is not already 1.

Sweep CSV columns are fixed: ``load``, ``waiting_probability_<k>`` and
``mean_matching_time_<k>`` for k = 1..N, ``waiting_probability_overall``,
``mean_matching_time_overall``, ``stable``. Numbers are written with 12
significant digits; undefined cells are empty.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import InputFormatError
from .graphs import CompatibilityGraph, build_graph
from .rates import RateVector

RATES_SUM_WARN_TOL = 1e-9


def parse_graph(text: str) -> CompatibilityGraph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_graph_json(text)
    return _parse_graph_lines(text)


def _parse_graph_json(text: str) -> CompatibilityGraph:
    try:
        obj = json.loads(text)
        n = int(obj["n"])
        edges = [(int(i), int(j)) for i, j in obj["edges"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad JSON graph: {exc}") from exc
    return _build_one_based(n, edges)


def _parse_graph_lines(text: str) -> CompatibilityGraph:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if not rows:
        raise InputFormatError("graph file is empty")
    try:
        n = int(rows[0])
    except ValueError as exc:
        raise InputFormatError(f"first line must be the class count, got {rows[0]!r}") from exc
    edges = []
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise InputFormatError(f"edge line must be 'i j', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise InputFormatError(f"bad edge line {line!r}") from exc
    return _build_one_based(n, edges)


def _build_one_based(n: int, edges: list[tuple[int, int]]) -> CompatibilityGraph:
    for i, j in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise InputFormatError(f"edge ({i}, {j}) out of range 1..{n}")
        if i == j:
            raise InputFormatError(f"self-edge at class {i}")
    try:
        return build_graph(n, [(i - 1, j - 1) for i, j in edges])
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def load_graph(path: str) -> CompatibilityGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def parse_rates(text: str) -> RateVector:
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            values = [float(v) for v in json.loads(text)]
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise InputFormatError(f"bad JSON rates: {exc}") from exc
    else:
        values = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise InputFormatError(f"bad rate line {line!r}") from exc
    if not values:
        raise InputFormatError("rates file is empty")
    if any(v < 0 for v in values) or not any(v > 0 for v in values):
        raise InputFormatError("rates must be nonnegative with a positive total")
    total = math.fsum(values)
    if abs(total - 1.0) > RATES_SUM_WARN_TOL:
        warnings.warn(
            f"rates sum to {total:.12g}; normalizing to 1", stacklevel=2
        )
    return RateVector.normalized(values)


def load_rates(path: str) -> RateVector:
    with open(path, encoding="utf-8") as fh:
        return parse_rates(fh.read())


def fmt(x: float) -> str:
    """12-significant-digit cell format; empty for undefined values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.12g}"


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep: per-class and overall metrics, or blanks."""

    load: float
    stable: bool
    omega: tuple[float, ...] | None
    eti: tuple[float, ...] | None
    overall_wait: float | None
    overall_time: float | None


def sweep_columns(n: int) -> list[str]:
    cols = ["load"]
    cols += [f"waiting_probability_{k}" for k in range(1, n + 1)]
    cols += [f"mean_matching_time_{k}" for k in range(1, n + 1)]
    cols += ["waiting_probability_overall", "mean_matching_time_overall", "stable"]
    return cols


def write_sweep_csv(fh: TextIO, n: int, rows: Iterable[SweepRow]) -> None:
    writer = csv.writer(fh)
    writer.writerow(sweep_columns(n))
    for row in rows:
        cells = [fmt(row.load)]
        if row.stable and row.omega is not None:
            cells += [fmt(v) for v in row.omega]
            cells += [fmt(v) for v in row.eti]
            cells += [fmt(row.overall_wait), fmt(row.overall_time)]
        else:
            cells += [""] * (2 * n + 2)
        cells.append("true" if row.stable else "false")
        writer.writerow(cells)


def simulation_columns(n: int) -> list[str]:
    """Sweep schema with a trailing half-width column per estimate."""
    cols = sweep_columns(n)
    hw = [f"waiting_probability_{k}_half_width" for k in range(1, n + 1)]
    hw += [f"mean_matching_time_{k}_half_width" for k in range(1, n + 1)]
    hw += ["waiting_probability_overall_half_width", "mean_matching_time_overall_half_width"]
    return cols + hw


def write_simulation_csv(fh: TextIO, est, load: float | None, stable: bool) -> None:
    """One row of simulation estimates in the shared schema, plus half-widths.

    Estimates are emitted even for unstable instances (the run happened and
    the data is real); the ``stable`` flag carries the caveat. Per-class
    matching times come from the count estimates via Little's law, so their
    half-widths are the count half-widths rescaled the same way.
    """
    n = len(est.omega_hat)
    alpha = est.rates.alpha
    eti = [est.Li_hat[i] / alpha[i] if alpha[i] > 0 else math.nan for i in range(n)]
    eti_hw = [
        est.Li_half_width[i] / alpha[i] if alpha[i] > 0 else math.nan for i in range(n)
    ]
    writer = csv.writer(fh)
    writer.writerow(simulation_columns(n))
    cells = [fmt(load)]
    cells += [fmt(v) for v in est.omega_hat]
    cells += [fmt(v) for v in eti]
    cells += [fmt(est.avg_wait_hat), fmt(est.L_hat)]
    cells.append("true" if stable else "false")
    cells += [fmt(v) for v in est.omega_half_width]
    cells += [fmt(v) for v in eti_hw]
    cells += [fmt(est.avg_wait_half_width), fmt(est.L_half_width)]
    writer.writerow(cells)


def read_sweep_csv(fh: TextIO) -> tuple[list[str], list[SweepRow]]:
    reader = csv.reader(fh)
    header = next(reader)
    n = (len(header) - 4) // 2
    rows = []
    for cells in reader:
        stable = cells[-1] == "true"
        if stable and cells[1]:
            omega = tuple(float(v) for v in cells[1 : n + 1])
            eti = tuple(float(v) if v else math.nan for v in cells[n + 1 : 2 * n + 1])
            overall_wait = float(cells[2 * n + 1])
            overall_time = float(cells[2 * n + 2])
        else:
            omega = eti = None
            overall_wait = overall_time = None
        rows.append(
            SweepRow(
                load=float(cells[0]),
                stable=stable,
                omega=omega,
                eti=eti,
                overall_wait=overall_wait,
                overall_time=overall_time,
            )
        )
    return header, rows
