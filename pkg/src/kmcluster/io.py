"""CSV input/output for datasets, labels and result tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import UsageError, as_data_matrix


@dataclass
class CsvDataset:
    data: np.ndarray
    feature_names: list[str]
    truth: np.ndarray | None = None
    # original truth values, in the order their codes were assigned
    truth_levels: list[str] | None = None


def _encode_truth(values: list[str]) -> tuple[np.ndarray, list[str]]:
    """Integer codes 0..k-1 in order of first appearance."""
    levels: dict[str, int] = {}
    codes = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        codes[i] = levels.setdefault(v.strip(), len(levels))
    return codes, list(levels)


def read_csv(path, truth_col: str | None = None) -> CsvDataset:
    """Read a numeric CSV with a header row.

    Every column except ``truth_col`` must be numeric. Columns with an empty
    header (row names written by R's ``write.csv``) are dropped. The truth
    column may hold arbitrary strings.

    Raises:
        UsageError: unreadable file, missing column, or non-numeric feature.
    """
    try:
        with open(Path(path), newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise UsageError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if any(len(r) != len(header) for r in body):
        raise UsageError(f"{path}: ragged rows")
    if truth_col is not None and truth_col not in header:
        raise UsageError(f"{path}: no column named {truth_col!r}")
    feat_idx = [j for j, h in enumerate(header) if h and h != truth_col]
    if not feat_idx:
        raise UsageError(f"{path}: no feature columns")
    try:
        data = np.array([[float(r[j]) for j in feat_idx] for r in body])
    except ValueError as exc:
        raise UsageError(f"{path}: non-numeric feature value ({exc})") from exc
    data = as_data_matrix(data)
    truth = levels = None
    if truth_col is not None:
        tj = header.index(truth_col)
        truth, levels = _encode_truth([r[tj] for r in body])
    return CsvDataset(data, [header[j] for j in feat_idx], truth, levels)


def bundled_base_path() -> Path:
    """Path of the bundled synthetic two-group base dataset (truth column ``status``)."""
    return Path(str(resources.files("kmcluster") / "data" / "two_group_base.csv"))


def load_bundled_base() -> CsvDataset:
    return read_csv(bundled_base_path(), truth_col="status")


def fmt_float(v: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(v))


def write_labels(path, labels) -> None:
    """``row,label`` CSV with 1-based labels and 0-based input row index."""
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "label"])
        for i, lab in enumerate(np.asarray(labels)):
            w.writerow([i, int(lab) + 1])


def write_table(dest, header: list[str], rows) -> None:
    """CSV with round-trip float formatting; ``dest`` is a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_rows(dest, header, rows)
        return
    with open(Path(dest), "w", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_report(path, items: dict) -> None:
    Path(path).write_text(format_report(items))


def format_report(items: dict) -> str:
    """Flat ``key: value`` text, one entry per line, in insertion order."""
    lines = []
    for key, value in items.items():
        if isinstance(value, (float, np.floating)):
            value = fmt_float(value)
        elif isinstance(value, (list, tuple, np.ndarray)):
            value = " ".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v) for v in value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"
