"""CSV trace emission and parsing.

The trace file starts with a ``# schema_version=N`` comment line, then a
header row, then one row per logged record.  Floats are written with 17
significant digits so values round-trip exactly and repeated runs can be
compared byte-for-byte.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .errors import SchemaMismatch

SCHEMA_VERSION = 1

COLUMNS = (
    ["t"]
    + [f"x{i}" for i in (1, 2, 3)]
    + [f"v{i}" for i in (1, 2, 3)]
    + [f"R{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    + [f"W{i}" for i in (1, 2, 3)]
    + ["f"]
    + [f"M{i}" for i in (1, 2, 3)]
    + [f"f{i}" for i in (1, 2, 3, 4)]
    + ["mode", "Psi"]
    + [f"eR{i}" for i in (1, 2, 3)]
    + [f"eW{i}" for i in (1, 2, 3)]
    + [f"ex{i}" for i in (1, 2, 3)]
    + [f"ev{i}" for i in (1, 2, 3)]
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _record_row(rec) -> list[str]:
    vals = (
        [rec.t]
        + list(rec.x)
        + list(rec.v)
        + list(rec.R.reshape(9))
        + list(rec.omega)
        + [rec.f]
        + list(rec.M)
        + list(rec.rotor_thrusts)
    )
    row = [_fmt(v) for v in vals]
    row.append(rec.mode)
    row += [_fmt(v) for v in [rec.psi, *rec.e_R, *rec.e_Omega, *rec.e_x, *rec.e_v]]
    return row


def trace_to_csv_text(records) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rec in records:
        writer.writerow(_record_row(rec))
    return buf.getvalue()


def write_trace_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(trace_to_csv_text(records))


def read_trace_csv(path) -> dict:
    """Parse a trace CSV into a dict of numpy arrays (plus the mode list)."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# schema_version="):
            raise SchemaMismatch("missing schema_version comment line")
        version = first.strip().split("=", 1)[1]
        if version != str(SCHEMA_VERSION):
            raise SchemaMismatch(f"unsupported schema_version {version}")
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != COLUMNS:
            raise SchemaMismatch("header does not match the trace schema")
        rows = list(reader)
    n = len(rows)
    mode_idx = COLUMNS.index("mode")
    modes = [row[mode_idx] for row in rows]
    nums = np.array(
        [[float(v) for k, v in enumerate(row) if k != mode_idx] for row in rows]
    ).reshape(n, len(COLUMNS) - 1)
    col = {name: i for i, name in enumerate(c for c in COLUMNS if c != "mode")}

    def block(names):
        return nums[:, [col[n_] for n_ in names]]

    return {
        "t": nums[:, col["t"]],
        "x": block(["x1", "x2", "x3"]),
        "v": block(["v1", "v2", "v3"]),
        "R": block([f"R{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]).reshape(
            n, 3, 3
        ),
        "omega": block(["W1", "W2", "W3"]),
        "f": nums[:, col["f"]],
        "M": block(["M1", "M2", "M3"]),
        "rotor_thrusts": block(["f1", "f2", "f3", "f4"]),
        "mode": modes,
        "psi": nums[:, col["Psi"]],
        "e_R": block(["eR1", "eR2", "eR3"]),
        "e_Omega": block(["eW1", "eW2", "eW3"]),
        "e_x": block(["ex1", "ex2", "ex3"]),
        "e_v": block(["ev1", "ev2", "ev3"]),
    }
