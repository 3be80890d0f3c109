"""File formats: functional-data CSV, model JSON, depth reports, plot CSV.

The dataset format is a plain CSV whose header carries the grid:

    t,0,0.01,0.02,...
    curve-a,1.2,1.3,...
    curve-b,0.4,0.2,...

The first header cell is the literal ``t``; the remaining cells are the
grid points, which must be strictly increasing and uniformly spaced to
within 1e-9 relative tolerance. Every later row is one function: an id
followed by one value per grid point. Floats are written with 17
significant digits, so write/read round-trips are exact.

Models and depth reports are JSON; the model container holds everything
needed to score new functions (grid, mean, eigenvalues, eigenfunctions,
coefficients, threshold).
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .core import FunctionalSample, Grid, GridFunction
from .covkernel import EigenSystem, FittedModel

__all__ = [
    "DatasetFormatError",
    "read_dataset",
    "write_dataset",
    "write_model",
    "read_model",
    "depth_report",
    "format_report",
    "write_plot_csv",
]

MODEL_FORMAT = "fdepth-model-v1"


class DatasetFormatError(ValueError):
    """A file does not conform to the documented format."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_dataset(path, sample: FunctionalSample) -> None:
    """Write a functional sample as a dataset CSV (17 significant digits)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [_fmt(t) for t in sample.grid.points])
        for label, row in zip(sample.ids, sample.values):
            writer.writerow([label] + [_fmt(v) for v in row])


def read_dataset(path) -> FunctionalSample:
    """Read a dataset CSV, validating the header grid and row widths."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("empty file: missing header row") from None
        if not header or header[0].strip() != "t":
            raise DatasetFormatError('line 1: first header cell must be the literal "t"')
        if len(header) < 4:
            raise DatasetFormatError("line 1: need at least 3 grid points")
        try:
            points = np.array([float(c) for c in header[1:]])
        except ValueError as exc:
            raise DatasetFormatError(f"line 1: non-numeric grid point ({exc})") from None
        try:
            grid = Grid.from_points(points)
        except ValueError as exc:
            raise DatasetFormatError(f"line 1: {exc}") from None

        ids = []
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetFormatError(
                    f"line {lineno}: expected {len(header)} cells, got {len(row)}"
                )
            ids.append(row[0])
            try:
                rows.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise DatasetFormatError(f"line {lineno}: non-numeric value ({exc})") from None
    if not rows:
        raise DatasetFormatError("no data rows after the header")
    try:
        return FunctionalSample(grid, np.array(rows), ids=ids)
    except ValueError as exc:
        raise DatasetFormatError(str(exc)) from None


def write_model(path, model: FittedModel) -> None:
    """Serialize a fitted model to its JSON container."""
    system = model.system
    obj = {
        "format": MODEL_FORMAT,
        "grid": {"t0": system.grid.t0, "t1": system.grid.t1, "m": system.grid.m},
        "n": model.n,
        "delta": model.delta,
        "centered": model.centered,
        "raw_count": system.raw_count,
        "ids": model.ids,
        "mean": model.mean.values.tolist(),
        "eigenvalues": system.eigenvalues.tolist(),
        "eigenfunctions": system.eigenfunctions.tolist(),
        "coefficients": model.coeffs.coeffs.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def read_model(path) -> FittedModel:
    """Load a model JSON container back into a FittedModel."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or obj.get("format") != MODEL_FORMAT:
        raise DatasetFormatError(f"not a {MODEL_FORMAT} file")
    try:
        g = obj["grid"]
        grid = Grid(g["t0"], g["t1"], g["m"])
        system = EigenSystem(
            grid,
            np.array(obj["eigenvalues"], dtype=float),
            np.array(obj["eigenfunctions"], dtype=float),
            delta=obj["delta"],
            raw_count=obj["raw_count"],
        )
        mean = GridFunction(grid, np.array(obj["mean"], dtype=float))
        from .covkernel import CoefficientMatrix

        coeffs = CoefficientMatrix(np.array(obj["coefficients"], dtype=float), system)
        return FittedModel(
            mean=mean,
            system=system,
            coeffs=coeffs,
            delta=float(obj["delta"]),
            n=int(obj["n"]),
            centered=bool(obj["centered"]),
            ids=obj.get("ids"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"malformed model file: {exc}") from None


def depth_report(
    criterion: str,
    estimator: str,
    N: int,
    seed: int,
    delta: float | None,
    weights: str | None,
    ids,
    results,
    flags,
) -> dict:
    """Assemble the report object: one entry per input id, in input order."""
    entries = []
    for label, res, flag in zip(ids, results, flags):
        entries.append(
            {
                "id": label,
                "depth": res.value,
                "criterion_value": res.criterion_value,
                "outlier": bool(flag),
            }
        )
    return {
        "criterion": criterion,
        "estimator": estimator,
        "N": N,
        "seed": seed,
        "delta": delta,
        "weights": weights,
        "results": entries,
    }


def format_report(report: dict) -> str:
    """Deterministic JSON text for a report (byte-identical reruns)."""
    return json.dumps(report, indent=1) + "\n"


def write_plot_csv(path, sample: FunctionalSample, depths) -> None:
    """Long-format CSV (id, t, value, depth) for external plotting tools."""
    depths = list(depths)
    if len(depths) != sample.n:
        raise ValueError("need one depth per sample function")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "t", "value", "depth"])
        for label, row, d in zip(sample.ids, sample.values, depths):
            for t, v in zip(sample.grid.points, row):
                writer.writerow([label, _fmt(t), _fmt(v), _fmt(d)])
