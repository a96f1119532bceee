"""Round trips and byte determinism of the CSV/JSON interfaces."""

import json

import numpy as np

from hypercross.hull import convex_hull
from hypercross.rng import master_rng
from hypercross.samplers import (
    intersection_process,
    sample_limit_process,
    sample_poisson_hyperplanes,
)
from hypercross.serialize import (
    dumps_json,
    hyperplane_sample_from_json_dict,
    hyperplane_sample_to_csv,
    hyperplane_sample_to_json_dict,
    point_sample_from_json_dict,
    point_sample_to_csv,
    point_sample_to_json_dict,
    polytope_to_json_dict,
    write_csv_rows,
)


def test_point_sample_json_round_trip():
    sample = sample_limit_process(3, 0.093, 0.05, master_rng(1))
    back = point_sample_from_json_dict(
        json.loads(dumps_json(point_sample_to_json_dict(sample)))
    )
    assert back.dim == 3
    assert np.allclose(back.points, sample.points)
    assert back.meta["r_min"] == 0.05


def test_hyperplane_sample_json_round_trip():
    sample = sample_poisson_hyperplanes(500.0, 0.1, 2, master_rng(2))
    sample.skipped_tuples = 3
    back = hyperplane_sample_from_json_dict(
        json.loads(dumps_json(hyperplane_sample_to_json_dict(sample)))
    )
    assert np.allclose(back.normals, sample.normals)
    assert np.allclose(back.offsets, sample.offsets)
    assert back.skipped_tuples == 3 and back.radius == sample.radius


def test_point_csv_format(tmp_path):
    sample = intersection_process(sample_poisson_hyperplanes(2000.0, 0.01, 2, master_rng(3)))
    path = tmp_path / "pts.csv"
    point_sample_to_csv(sample, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x0,x1"
    assert len(lines) == len(sample) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert np.allclose(first, sample.points[0])


def test_plane_csv_format(tmp_path):
    sample = sample_poisson_hyperplanes(500.0, 0.1, 3, master_rng(4))
    path = tmp_path / "planes.csv"
    hyperplane_sample_to_csv(sample, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n0,n1,n2,offset"
    assert len(lines) == len(sample) + 1


def test_csv_and_json_bytes_are_deterministic(tmp_path):
    for trial in ("a", "b"):
        sample = sample_limit_process(2, 0.135, 0.05, master_rng(42))
        point_sample_to_csv(sample, tmp_path / f"{trial}.csv")
        (tmp_path / f"{trial}.json").write_text(
            dumps_json(point_sample_to_json_dict(sample))
        )
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_polytope_json_shape():
    poly = convex_hull(master_rng(5).standard_normal((20, 3)))
    obj = polytope_to_json_dict(poly)
    assert obj["dim"] == 3
    assert obj["fVector"] == list(poly.f_vector())
    assert len(obj["vertices"]) == poly.f_vector()[0]
    assert len(obj["facets"]) == poly.f_vector()[2]
    json.dumps(obj)


def test_write_csv_rows_mixed_types(tmp_path):
    path = tmp_path / "rows.csv"
    write_csv_rows(path, ["rep", "value"], [[0, 1.5], [1, 2.25]])
    assert path.read_text() == "rep,value\n0,1.5\n1,2.25\n"
