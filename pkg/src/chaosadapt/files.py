"""File formats: dataset CSV, expansion documents, and run manifests.

Everything is plain text. Floats are written with 17 significant digits,
which round-trips IEEE doubles exactly, so written artifacts reload
bit-for-bit. Writes go through a temporary file in the target directory
followed by an atomic rename.
"""

import csv
import hashlib
import json
import os
import tempfile
from dataclasses import asdict

import numpy as np

from .adaptation import AdaptationConfig, AdaptedExpansion
from .bpdn import DouglasRachfordConfig
from .data import Dataset
from .expansion import ChaosExpansion
from .indexing import MultiIndexSet
from .mapping import ParameterRange, uniform_to_gaussian
from .rotation import ProjectionMatrix, RotationConfig

__all__ = [
    "atomic_write_text",
    "write_dataset_csv",
    "read_dataset_csv",
    "read_ranges_csv",
    "write_expansion",
    "read_expansion",
    "write_density_csv",
    "dataset_digest",
    "config_to_dict",
    "config_from_dict",
    "write_manifest",
    "read_manifest",
]

EXPANSION_FORMAT = "chaosadapt-expansion"
MANIFEST_FORMAT = "chaosadapt-run"
FORMAT_VERSION = 1


def atomic_write_text(path, text):
    """Write the full text, then atomically replace the target path."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value):
    return format(float(value), ".17g")


def write_dataset_csv(data, path):
    """Write samples with the header ``xi_1,...,xi_d,u``."""
    header = [f"xi_{j + 1}" for j in range(data.dimension)] + ["u"]
    lines = [",".join(header)]
    for row, out in zip(data.inputs, data.outputs):
        lines.append(",".join([_fmt(v) for v in row] + [_fmt(out)]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_float(token, line_no, column):
    try:
        value = float(token)
    except ValueError:
        raise ValueError(
            f"line {line_no}, column {column}: {token!r} is not a number"
        ) from None
    if not np.isfinite(value):
        raise ValueError(f"line {line_no}, column {column}: non-finite value {token!r}")
    return value


def read_dataset_csv(path, ranges=None):
    """Read a dataset written by :func:`write_dataset_csv` or produced
    externally.

    The header names the input columns followed by one output column.
    Inputs named ``xi_*`` are taken as Gaussian coordinates directly; any
    other input naming requires ``ranges`` (one :class:`ParameterRange`
    per input column, matched by name when the names agree, otherwise by
    position) and the values are mapped through the inverse normal CDF.
    Ragged rows and non-finite or unparsable fields raise with the line
    number.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [name.strip() for name in header]
        if len(header) < 2:
            raise ValueError(f"{path}: header must name inputs and one output")
        n_inputs = len(header) - 1
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue  # ignore blank lines
            if len(record) != len(header):
                raise ValueError(
                    f"line {line_no}: expected {len(header)} fields, got {len(record)}"
                )
            rows.append(
                [_parse_float(tok, line_no, j + 1) for j, tok in enumerate(record)]
            )
    if not rows:
        raise ValueError(f"{path}: no data rows")
    table = np.asarray(rows)
    inputs, outputs = table[:, :n_inputs], table[:, n_inputs]

    gaussian_named = all(name.startswith("xi_") for name in header[:n_inputs])
    if not gaussian_named:
        if ranges is None:
            raise ValueError(
                f"{path}: input columns {header[:n_inputs]} are not Gaussian "
                "(xi_*) columns; physical columns need parameter ranges"
            )
        if len(ranges) != n_inputs:
            raise ValueError(
                f"{path}: {len(ranges)} ranges for {n_inputs} input columns"
            )
        by_name = {r.name: r for r in ranges}
        if all(name in by_name for name in header[:n_inputs]):
            ranges = [by_name[name] for name in header[:n_inputs]]
        inputs = uniform_to_gaussian(inputs, ranges)
    return Dataset(inputs, outputs)


def read_ranges_csv(path):
    """Read ``name,lower,upper`` rows into :class:`ParameterRange` objects."""
    ranges = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        if [h.strip().lower() for h in header[:3]] != ["name", "lower", "upper"]:
            raise ValueError(f"{path}: expected header 'name,lower,upper'")
        for line_no, record in enumerate(reader, start=2):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if len(record) != 3:
                raise ValueError(f"line {line_no}: expected 3 fields, got {len(record)}")
            ranges.append(
                ParameterRange(
                    record[0].strip(),
                    _parse_float(record[1], line_no, 2),
                    _parse_float(record[2], line_no, 3),
                )
            )
    if not ranges:
        raise ValueError(f"{path}: no parameter rows")
    return ranges


def write_density_csv(curve, path):
    lines = ["x,pdf"]
    for x, p in zip(curve.abscissae, curve.pdf_values):
        lines.append(f"{_fmt(x)},{_fmt(p)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _finite_or_none(value):
    value = float(value)
    return value if np.isfinite(value) else None


def write_expansion(result, path, metadata=None):
    """Serialize an :class:`AdaptedExpansion` as a versioned JSON document."""
    document = {
        "format": EXPANSION_FORMAT,
        "version": FORMAT_VERSION,
        "input_dimension": result.projection.n_columns,
        "n_directions": result.projection.n_rows,
        "n_frozen": result.projection.n_frozen,
        "order": result.order,
        "projection": [[float(v) for v in row] for row in result.projection.matrix],
        "multi_indices": [list(idx) for idx in result.expansion.index_set],
        "coefficients": [float(c) for c in result.expansion.coefficients],
        "fit_epsilon": _finite_or_none(result.fit_epsilon),
        "l2_residual": float(result.l2_residual),
        "outer_iterations": int(result.outer_iterations),
    }
    if metadata:
        document["metadata"] = metadata
    atomic_write_text(path, json.dumps(document, indent=1) + "\n")


def read_expansion(path):
    with open(path, "r", encoding="utf-8") as handle:
        document = json.load(handle)
    if document.get("format") != EXPANSION_FORMAT:
        raise ValueError(f"{path}: not an expansion document")
    if document.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {document.get('version')}")
    index_set = MultiIndexSet(document["n_directions"], document["order"])
    stored = [tuple(idx) for idx in document["multi_indices"]]
    if stored != list(index_set):
        raise ValueError(f"{path}: stored multi-index order does not match")
    epsilon = document["fit_epsilon"]
    return AdaptedExpansion(
        projection=ProjectionMatrix(
            np.asarray(document["projection"], dtype=float),
            n_frozen=document["n_frozen"],
        ),
        expansion=ChaosExpansion(index_set, np.asarray(document["coefficients"])),
        order=document["order"],
        fit_epsilon=np.nan if epsilon is None else float(epsilon),
        l2_residual=float(document["l2_residual"]),
        outer_iterations=int(document["outer_iterations"]),
    )


def dataset_digest(data):
    """SHA-256 over the canonical 17-digit serialization of the samples."""
    hasher = hashlib.sha256()
    for row, out in zip(data.inputs, data.outputs):
        line = ",".join([_fmt(v) for v in row] + [_fmt(out)]) + "\n"
        hasher.update(line.encode("ascii"))
    return hasher.hexdigest()


def config_to_dict(config):
    return asdict(config)


def config_from_dict(payload):
    payload = dict(payload)
    payload["dr"] = DouglasRachfordConfig(**payload.get("dr", {}))
    payload["rotation"] = RotationConfig(**payload.get("rotation", {}))
    payload["cv_grid_span"] = tuple(payload.get("cv_grid_span", (1e-4, 1.0)))
    return AdaptationConfig(**payload)


def write_manifest(path, *, config, data, order, max_directions, results, tool_version):
    """Write the run manifest: everything needed to reproduce the results."""
    document = {
        "format": MANIFEST_FORMAT,
        "version": FORMAT_VERSION,
        "tool_version": tool_version,
        "order": order,
        "max_directions": max_directions,
        "config": config_to_dict(config),
        "dataset": {
            "digest": dataset_digest(data),
            "n_samples": data.n_samples,
            "dimension": data.dimension,
        },
        "results": [
            {
                "n_directions": r.projection.n_rows,
                "fit_epsilon": _finite_or_none(r.fit_epsilon),
                "l2_residual": float(r.l2_residual),
                "outer_iterations": int(r.outer_iterations),
                "expansion_file": f"d{r.projection.n_rows}.json",
            }
            for r in results
        ],
    }
    atomic_write_text(path, json.dumps(document, indent=1) + "\n")


def read_manifest(path):
    with open(path, "r", encoding="utf-8") as handle:
        document = json.load(handle)
    if document.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{path}: not a run manifest")
    if document.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {document.get('version')}")
    return document
