"""
Helpers for writing reproducible CSV tables and JSON reports.
"""
import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from src.utils.constants import CSV_FLOAT_FORMAT


def sanitize(payload):
    """
    Convert a nested payload into plain JSON-safe values.

    numpy scalars become Python numbers, tuples become lists and non-finite
    floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(payload, dict):
        return {str(k): sanitize(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple, np.ndarray)):
        return [sanitize(v) for v in payload]
    if isinstance(payload, (np.bool_, bool)):
        return bool(payload)
    if isinstance(payload, (np.integer, int)):
        return int(payload)
    if isinstance(payload, (np.floating, float)):
        value = float(payload)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return payload


def format_float(value):
    """Render a float with 17 significant digits, non-finite values as inf/nan."""
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return format(value, CSV_FLOAT_FORMAT)


def _format_cell(cell):
    if isinstance(cell, (float, np.floating)):
        return format_float(cell)
    return str(cell)


def write_csv(path, header, rows):
    """
    Write rows under a fixed header; floats use 17 significant digits.

    Args:
        path: Output file path (parents are created)
        header: Sequence of column names
        rows: Iterable of row sequences

    Returns:
        Path: The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(c) for c in row])
    logging.info(f"Wrote {path}")
    return path


def write_json(path, payload):
    """Write a payload as pretty-printed JSON with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as handle:
        json.dump(sanitize(payload), handle, indent=2, sort_keys=True)
        handle.write('\n')
    logging.info(f"Wrote {path}")
    return path
