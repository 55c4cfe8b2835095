"""Readers and writers for the CSV and JSON files exchanged with users.

CSV files are UTF-8, comma separated, with a single header line. Floats are written
with a fixed ``%.12e`` format so repeated runs produce identical files.
"""

import csv
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from .json import JSONDecodeError, dumps, loads

FLOAT_FORMAT = "{:.12e}"

GRID_HEADER = ("d_lambda_s_nm", "d_lambda_i_nm", "re", "im", "abs2")
ADP_HEADER = ("nu_sum_rad_per_ps", "re", "im", "abs2")
PUMP_SPECTRUM_HEADER = ("nu_rad_per_ps", "re", "im", "abs2")
WAVEFORM_HEADER = ("time_ps", "re", "im", "abs2")
SWEEP_HEADER = ("value", "purity", "g2", "n_peaks")
ORIENTATION_HEADER = ("lambda_p_nm", "offset_nm", "theta_deg")


class InputError(ValueError):
    """Malformed user input, optionally tied to a line of the offending file."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.message} (line {self.line})"


PathLike = Union[str, Path]


def format_float(value: float) -> str:
    return FLOAT_FORMAT.format(float(value))


def write_table(
    path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]
) -> None:
    """Write equal-length columns under ``header``."""
    columns = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    if len(columns) != len(header):
        raise ValueError("one column is needed per header field")
    with Path(path).open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format_float(v) for v in row])


def read_table(path: PathLike, header: Sequence[str]) -> Dict[str, np.ndarray]:
    """
    Read a numeric CSV table with the given header.

    :return: one float array per column
    :raise InputError: if the file is empty, has another header, a malformed row or
        no data rows
    """
    path = Path(path)
    header = tuple(header)
    rows = []
    with path.open(newline="", encoding="utf-8") as file:
        reader = csv.reader(file)
        found = next(reader, None)
        if found is None:
            raise InputError(f"{path} is empty", line=1)
        if tuple(h.strip() for h in found) != header:
            raise InputError(f"{path}: expected header {','.join(header)}", line=1)
        for row in reader:
            if not row or all(not v.strip() for v in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"{path}: expected {len(header)} fields, got {len(row)}",
                    line=reader.line_num,
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise InputError(
                    f"{path}: invalid number in {','.join(row)}", line=reader.line_num
                ) from None
    if not rows:
        raise InputError(f"{path} contains no data rows", line=2)
    data = np.array(rows, dtype=float)
    if not np.all(np.isfinite(data)):
        raise InputError(f"{path} contains non-finite values")
    return {name: data[:, n] for n, name in enumerate(header)}


def write_grid_csv(
    path: PathLike,
    d_lambda_s: np.ndarray,
    d_lambda_i: np.ndarray,
    values: np.ndarray,
) -> None:
    """Write a complex signal × idler grid row-major with wavelength-detuning axes."""
    values = np.asarray(values, dtype=complex)
    ls, li = np.meshgrid(d_lambda_s, d_lambda_i, indexing="ij")
    write_table(
        path,
        GRID_HEADER,
        [ls, li, values.real, values.imag, np.abs(values) ** 2],
    )


def read_grid_csv(path: PathLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Read a grid written by :func:`write_grid_csv`.

    :return: (signal axis, idler axis, complex values) with values[i, j] at
        (signal axis[i], idler axis[j])
    """
    table = read_table(path, GRID_HEADER)
    ls, li = table["d_lambda_s_nm"], table["d_lambda_i_nm"]
    # row-major: the idler axis repeats within each signal block
    n_idler = int(np.argmax(ls != ls[0])) or ls.size
    if ls.size % n_idler:
        raise InputError(f"{path} is not a complete row-major grid")
    n_signal = ls.size // n_idler
    shape = (n_signal, n_idler)
    signal_axis = ls.reshape(shape)[:, 0]
    idler_axis = li.reshape(shape)[0, :]
    if not (
        np.array_equal(ls.reshape(shape), np.repeat(signal_axis[:, None], n_idler, 1))
        and np.array_equal(li.reshape(shape), np.tile(idler_axis, (n_signal, 1)))
    ):
        raise InputError(f"{path} is not a complete row-major grid")
    re, im, abs2 = table["re"], table["im"], table["abs2"]
    if not np.any(re) and not np.any(im):
        # intensity-only file
        values = np.sqrt(np.clip(abs2, 0, None)).astype(complex)
    else:
        values = re + 1j * im
    return signal_axis, idler_axis, values.reshape(shape)


def write_intensity_csv(
    path: PathLike,
    d_lambda_s: np.ndarray,
    d_lambda_i: np.ndarray,
    intensity: np.ndarray,
) -> None:
    """Write a real intensity map: zero re/im columns, the map under abs2."""
    intensity = np.asarray(intensity, dtype=float)
    ls, li = np.meshgrid(d_lambda_s, d_lambda_i, indexing="ij")
    zeros = np.zeros_like(intensity)
    write_table(path, GRID_HEADER, [ls, li, zeros, zeros, intensity])


def write_complex_series(
    path: PathLike, header: Sequence[str], axis: np.ndarray, values: np.ndarray
) -> None:
    """Write a complex 1-D series as axis, re, im, abs2 columns."""
    values = np.asarray(values, dtype=complex)
    write_table(path, header, [axis, values.real, values.imag, np.abs(values) ** 2])


def write_sweep_csv(path: PathLike, rows: Sequence[Tuple[float, float, float, int]]):
    """One ``value,purity,g2,n_peaks`` row per sweep point, in the given order."""
    with Path(path).open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for value, purity, g2, n_peaks in rows:
            writer.writerow(
                [format_float(value), format_float(purity), format_float(g2), n_peaks]
            )


def write_json(path: PathLike, data: Any) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


def load_document(path: PathLike) -> Any:
    """
    Load a JSON or YAML document.

    :raise InputError: if the file is missing or does not parse
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path} does not exist")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            return loads(text)
        except JSONDecodeError as err:
            raise InputError(f"{path}: {err.msg}", line=err.lineno) from err
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise InputError(f"{path}: invalid YAML document", line=line) from err
