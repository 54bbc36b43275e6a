"""CSV files of simulation traces, calibration maps and static fits.

Numbers are written as the shortest text that parses back to the same
float and temperatures are written in Celsius, so reading a written file
gives back every value exactly.
"""
import csv
from typing import Iterator, List, Sequence, TextIO

import numpy as np

from errors import NonMonotonicTimeError, SchemaError
from simulation import SimTrace
from thermal.calibration import (
    CalibrationMap, CalibrationSample, StaticFitResult
)
from utils import celsius_to_kelvin, format_celsius, format_float

# Columns of a trace file before the per-node temperatures.
TRACE_COLUMNS = ("time_s", "v_gs_V", "v_ds_V", "i_ds_A", "p_W")

# Columns of a static fit file.
FIT_COLUMNS = ("node", "r_K_per_W", "ambient_C", "residual_rms_K",
               "r_squared")

# Prefix and suffix of a node temperature column.
NODE_PREFIX = "t_"
NODE_SUFFIX = "_C"


def node_column(node: str) -> str:
    """Temperature column name of a node."""
    return NODE_PREFIX + node + NODE_SUFFIX


def _column_node(column: str) -> str:
    """Node name of a temperature column."""
    if (not column.startswith(NODE_PREFIX)
            or not column.endswith(NODE_SUFFIX)
            or len(column) <= len(NODE_PREFIX) + len(NODE_SUFFIX)):
        raise SchemaError(
            "Column '{0}' is not a node temperature column "
            "({1}<node>{2})".format(column, NODE_PREFIX, NODE_SUFFIX))
    return column[len(NODE_PREFIX):-len(NODE_SUFFIX)]


def _writer(file: TextIO):
    return csv.writer(file, lineterminator="\n")


def _rows(file: TextIO, leading: Sequence[str]) -> Iterator[List[str]]:
    """Header check followed by the data rows of a CSV file."""
    reader = csv.reader(file)
    header = next(reader, None)
    if header is None:
        raise SchemaError("File is empty, expected a header row")

    expected = list(leading)
    if header[:len(expected)] != expected:
        raise SchemaError("Header must start with {0}, got {1}".format(
            ",".join(expected), ",".join(header)))

    yield header
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise SchemaError(
                "Row {0} has {1} columns, the header has {2}".format(
                    reader.line_num, len(row), len(header)))
        yield row


def _parse_float(text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError("Column {0} holds a non-numeric value '{1}'".format(
            column, text))


def write_trace(file: TextIO, trace: SimTrace) -> None:
    """Write a trace as CSV."""
    writer = _writer(file)
    writer.writerow(TRACE_COLUMNS
                    + tuple(node_column(node) for node in trace.nodes))
    for k in range(len(trace)):
        writer.writerow(
            [format_float(trace.time[k]), format_float(trace.v_gs[k]),
             format_float(trace.v_ds[k]), format_float(trace.i_ds[k]),
             format_float(trace.p[k])]
            + [format_celsius(t) for t in trace.temps[k]])


def read_trace(file: TextIO) -> SimTrace:
    """Read a trace written by write_trace."""
    rows = _rows(file, TRACE_COLUMNS)
    header = next(rows)
    nodes = tuple(_column_node(c) for c in header[len(TRACE_COLUMNS):])
    if not nodes:
        raise SchemaError("Trace has no node temperature column")

    values = [[_parse_float(text, column)
               for text, column in zip(row, header)] for row in rows]
    data = np.array(values, dtype=float).reshape(-1, len(header))

    time = data[:, 0]
    decreasing = np.flatnonzero(np.diff(time) <= 0)
    if decreasing.size:
        # Line of the offending row, the header being line 1.
        raise NonMonotonicTimeError(int(decreasing[0]) + 3)

    temps = celsius_to_kelvin(data[:, len(TRACE_COLUMNS):])
    return SimTrace(nodes, time, data[:, 1], data[:, 2], data[:, 3],
                    data[:, 4], temps, np.zeros(len(time), dtype=bool))


def save_trace(filename: str, trace: SimTrace) -> None:
    """Save a trace to the file."""
    with open(filename, 'w', encoding='utf-8', newline='') as file:
        write_trace(file, trace)


def load_trace(filename: str) -> SimTrace:
    """Load a trace from the file."""
    with open(filename, 'r', encoding='utf-8', newline='') as file:
        return read_trace(file)


def write_calibration_map(file: TextIO, calibration: CalibrationMap) -> None:
    """Write calibration samples as CSV, one row per power."""
    writer = _writer(file)
    writer.writerow(["p_W"] + [node_column(n) for n in calibration.nodes])
    for sample in calibration.samples:
        writer.writerow([format_float(sample.p)]
                        + [format_celsius(t) for t in sample.temps])


def read_calibration_map(file: TextIO, ambient: float) -> CalibrationMap:
    """Read calibration samples taken at the given ambient (K)."""
    rows = _rows(file, ["p_W"])
    header = next(rows)
    nodes = tuple(_column_node(c) for c in header[1:])
    if not nodes:
        raise SchemaError("Calibration map has no node temperature column")

    samples = []
    for row in rows:
        values = [_parse_float(text, column)
                  for text, column in zip(row, header)]
        samples.append(CalibrationSample(
            values[0], tuple(celsius_to_kelvin(t) for t in values[1:])))

    return CalibrationMap(ambient, nodes, tuple(samples))


def write_static_fit(file: TextIO, fit: StaticFitResult) -> None:
    """Write a static fit as CSV, one row per node."""
    writer = _writer(file)
    writer.writerow(FIT_COLUMNS)
    for i, node in enumerate(fit.nodes):
        writer.writerow([node, format_float(fit.r[i]),
                         format_celsius(fit.ambient_est[i]),
                         format_float(fit.residual_rms[i]),
                         format_float(fit.r_squared[i])])


def read_static_fit(file: TextIO) -> StaticFitResult:
    """Read a static fit written by write_static_fit."""
    rows = _rows(file, FIT_COLUMNS)
    next(rows)

    nodes, r, ambient, rms, r_squared = [], [], [], [], []
    for row in rows:
        nodes.append(row[0])
        r.append(_parse_float(row[1], FIT_COLUMNS[1]))
        ambient.append(celsius_to_kelvin(
            _parse_float(row[2], FIT_COLUMNS[2])))
        rms.append(_parse_float(row[3], FIT_COLUMNS[3]))
        r_squared.append(_parse_float(row[4], FIT_COLUMNS[4]))

    if not nodes:
        raise SchemaError("Static fit has no node rows")
    return StaticFitResult(tuple(nodes), tuple(r), tuple(ambient),
                           tuple(rms), tuple(r_squared))
