"""Shared CSV ingestion for the figure scripts.

The scripts consume the workbench's documented CSV schemas and nothing
else; they are pure CSV-to-image transforms and never recompute physics.
A file whose header deviates from the schema is refused outright.
"""

import csv

# sweep CSV schema, version 1
SWEEP_COLUMNS = ["d", "decoder", "level", "noise_kind", "eta", "p_step", "p_cycle",
                 "trials", "instances", "logical_error_rate", "accuracy", "sd", "seed"]
# ratio-study CSV schema, version 1
RATIO_COLUMNS = ["d", "arch", "train_ratio", "test_ratio", "p_step", "p_cycle",
                 "instances", "mean_accuracy", "sd", "seed"]

_NUMERIC = {"d": int, "eta": float, "p_step": float, "p_cycle": float,
            "trials": int, "instances": int, "logical_error_rate": float,
            "accuracy": float, "sd": float, "seed": int,
            "train_ratio": float, "test_ratio": float, "mean_accuracy": float}


class SchemaError(ValueError):
    """The CSV header or payload does not match the documented schema."""


def read_rows(path, columns):
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header {columns}")
        if header != columns:
            missing = [c for c in columns if c not in (header or [])]
            extra = [c for c in (header or []) if c not in columns]
            detail = []
            if missing:
                detail.append(f"missing column(s): {', '.join(missing)}")
            if extra:
                detail.append(f"unexpected column(s): {', '.join(extra)}")
            raise SchemaError(f"{path}: header does not match schema"
                              + (" (" + "; ".join(detail) + ")" if detail else ""))
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(columns):
                raise SchemaError(f"{path}: line {lineno}: expected "
                                  f"{len(columns)} fields, got {len(raw)}")
            row = {}
            for key, value in zip(columns, raw):
                try:
                    row[key] = _NUMERIC[key](value) if key in _NUMERIC else value
                except ValueError:
                    raise SchemaError(f"{path}: line {lineno}: bad value "
                                      f"{value!r} for column {key}") from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_sweep_csv(path):
    return read_rows(path, SWEEP_COLUMNS)


def read_ratio_csv(path):
    return read_rows(path, RATIO_COLUMNS)


def series_key(row):
    return (row["d"], row["decoder"], row["level"])


def group_series(rows, key):
    groups = {}
    for row in rows:
        groups.setdefault(key(row), []).append(row)
    for rows_ in groups.values():
        rows_.sort(key=lambda r: r.get("p_step", 0))
    return groups
