"""CSV and JSON serialisation of samples, polytopes and reports.

All writers are byte-deterministic for identical inputs: floats use the
shortest round-trip representation and JSON keys are sorted. CSV files carry
a single header row naming the columns; metadata travels in the JSON form.
"""

import json

import numpy as np

from .hull import Polytope
from .samplers import HyperplaneSample, PointSample


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(obj))


def point_sample_to_csv(sample: PointSample, path) -> None:
    header = ",".join(f"x{i}" for i in range(sample.dim))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in sample.points:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def point_sample_to_json_dict(sample: PointSample) -> dict:
    return {
        "dim": sample.dim,
        "meta": sample.meta,
        "points": [[float(v) for v in row] for row in sample.points],
    }


def point_sample_from_json_dict(obj) -> PointSample:
    pts = np.asarray(obj["points"], dtype=float).reshape(-1, obj["dim"])
    return PointSample(int(obj["dim"]), pts, dict(obj.get("meta", {})))


def hyperplane_sample_to_csv(sample: HyperplaneSample, path) -> None:
    header = ",".join(f"n{i}" for i in range(sample.dim)) + ",offset"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for normal, offset in zip(sample.normals, sample.offsets):
            fh.write(",".join(_fmt(v) for v in normal) + "," + _fmt(offset) + "\n")


def hyperplane_sample_to_json_dict(sample: HyperplaneSample) -> dict:
    return {
        "dim": sample.dim,
        "radius": float(sample.radius),
        "meta": sample.meta,
        "skippedTuples": int(sample.skipped_tuples),
        "normals": [[float(v) for v in row] for row in sample.normals],
        "offsets": [float(v) for v in sample.offsets],
    }


def hyperplane_sample_from_json_dict(obj) -> HyperplaneSample:
    d = int(obj["dim"])
    normals = np.asarray(obj["normals"], dtype=float).reshape(-1, d)
    offsets = np.asarray(obj["offsets"], dtype=float)
    return HyperplaneSample(
        d,
        float(obj["radius"]),
        normals,
        offsets,
        int(obj.get("skippedTuples", 0)),
        dict(obj.get("meta", {})),
    )


def polytope_to_json_dict(p: Polytope) -> dict:
    return {
        "dim": p.dim,
        "vertices": [[float(v) for v in row] for row in p.vertices],
        "facets": [
            {"normal": [float(v) for v in n], "offset": float(b)}
            for n, b in zip(p.facet_normals, p.facet_offsets)
        ],
        "fVector": list(p.f_vector()),
    }


def write_csv_rows(path, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n"
            )
