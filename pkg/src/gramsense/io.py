"""File formats: FRF matrices and measurement vectors as JSON or CSV, plus report writers.

FRF CSV layout (one row per sensor)::

    # omega=<rad/s>
    sensor,re:<col0>,im:<col0>,re:<col1>,im:<col1>,...
    <row node>,<float>,<float>,...

Measurement CSV layout::

    sensor,re,im
    <row node>,<float>,<float>

Floats are written with ``repr`` so a write/read round trip is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, ParseError
from .frf import FrfMatrix


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def frf_to_dict(h: FrfMatrix) -> dict:
    return {
        "omega": h.omega,
        "rows": list(h.rows),
        "cols": list(h.cols),
        "real": h.values.real.tolist(),
        "imag": h.values.imag.tolist(),
    }


def frf_from_dict(d: dict, source="<dict>") -> FrfMatrix:
    try:
        values = np.array(d["real"], dtype=float) + 1j * np.array(d["imag"], dtype=float)
        return FrfMatrix(float(d.get("omega", math.nan)), d["rows"], d["cols"], values)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(source, None, None, f"invalid FRF JSON: {exc}") from exc


def write_frf_csv(path, h: FrfMatrix) -> None:
    buf = io.StringIO()
    buf.write(f"# omega={_fmt(h.omega)}\n")
    w = csv.writer(buf, lineterminator="\n")
    header = ["sensor"]
    for c in h.cols:
        header += [f"re:{c}", f"im:{c}"]
    w.writerow(header)
    for r, row in zip(h.rows, h.values):
        cells = [str(r)]
        for v in row:
            cells += [_fmt(v.real), _fmt(v.imag)]
        w.writerow(cells)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _read_lines(path):
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(path, None, None, f"cannot read file: {exc}") from exc


def _float(cell, path, line, col):
    try:
        return float(cell)
    except ValueError:
        raise ParseError(path, line, col, f"not a number: {cell!r}") from None


def _int(cell, path, line, col):
    try:
        return int(cell)
    except ValueError:
        raise ParseError(path, line, col, f"not an integer node index: {cell!r}") from None


def read_frf_csv(path) -> FrfMatrix:
    omega = math.nan
    header = None
    rows, data = [], []
    for lineno, text in enumerate(_read_lines(path), start=1):
        if not text.strip():
            continue
        if text.startswith("#"):
            body = text[1:].strip()
            if body.startswith("omega="):
                omega = _float(body[len("omega="):], path, lineno, 1)
            continue
        cells = next(csv.reader([text]))
        if header is None:
            if not cells or cells[0] != "sensor" or len(cells) % 2 != 1 or len(cells) < 3:
                raise ParseError(path, lineno, 1, "expected header 'sensor,re:<n>,im:<n>,...'")
            cols = []
            for k in range(1, len(cells), 2):
                re_lab, im_lab = cells[k], cells[k + 1]
                if not (re_lab.startswith("re:") and im_lab == "im:" + re_lab[3:]):
                    raise ParseError(path, lineno, k + 1, f"bad column pair {re_lab!r},{im_lab!r}")
                cols.append(_int(re_lab[3:], path, lineno, k + 1))
            header = cols
            continue
        if len(cells) != 1 + 2 * len(header):
            raise ParseError(path, lineno, len(cells),
                             f"expected {1 + 2 * len(header)} fields, found {len(cells)}")
        rows.append(_int(cells[0], path, lineno, 1))
        vals = [_float(c, path, lineno, j + 2) for j, c in enumerate(cells[1:])]
        data.append(np.array(vals[0::2]) + 1j * np.array(vals[1::2]))
    if header is None or not rows:
        raise ParseError(path, None, None, "no FRF data found")
    return FrfMatrix(omega, rows, header, np.array(data))


def write_vector_csv(path, y, rows=None) -> None:
    y = np.asarray(y, dtype=complex)
    rows = range(y.size) if rows is None else rows
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sensor", "re", "im"])
    for r, v in zip(rows, y):
        w.writerow([str(r), _fmt(v.real), _fmt(v.imag)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_vector_csv(path):
    """Return (sensor labels, complex values)."""
    labels, vals = [], []
    seen_header = False
    for lineno, text in enumerate(_read_lines(path), start=1):
        if not text.strip() or text.startswith("#"):
            continue
        cells = next(csv.reader([text]))
        if not seen_header:
            if cells != ["sensor", "re", "im"]:
                raise ParseError(path, lineno, 1, "expected header 'sensor,re,im'")
            seen_header = True
            continue
        if len(cells) != 3:
            raise ParseError(path, lineno, len(cells), f"expected 3 fields, found {len(cells)}")
        labels.append(_int(cells[0], path, lineno, 1))
        vals.append(complex(_float(cells[1], path, lineno, 2), _float(cells[2], path, lineno, 3)))
    if not vals:
        raise ParseError(path, None, None, "no measurement data found")
    return labels, np.array(vals)


def load_frf(path) -> FrfMatrix:
    if str(path).lower().endswith(".json"):
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.colno, exc.msg) from exc
        return frf_from_dict(d, path)
    return read_frf_csv(path)


def load_vector(path):
    if str(path).lower().endswith(".json"):
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
            vals = np.array(d["real"], dtype=float) + 1j * np.array(d["imag"], dtype=float)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.colno, exc.msg) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, None, None, f"invalid measurement JSON: {exc}") from exc
        labels = d.get("rows", list(range(vals.size)))
        if len(labels) != vals.size:
            raise DimensionMismatchError("rows and values differ in length")
        return [int(r) for r in labels], vals
    return read_vector_csv(path)


def write_matrix_csv(path, matrix, row_label="row") -> None:
    """Real-valued grid (e.g. |G| or |x_hat| maps), one CSV row per matrix row."""
    m = np.asarray(matrix, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([row_label] + [str(j) for j in range(m.shape[1])])
    for i, row in enumerate(m):
        w.writerow([str(i)] + [_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
