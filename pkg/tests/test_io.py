import numpy as np
import pytest

from gsk.exceptions import InputError
from gsk.io import RunReport, load_model, model_to_dict, read_dataset, read_inputs, write_json, write_table
from gsk.kernels import StationaryGSK


def test_csv_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(2, 50)) * 10.0 ** rng.integers(-300, 300, (2, 50))
    write_table(tmp_path / "t.csv", ["x1", "y"], [a, b])
    X, y = read_dataset(tmp_path / "t.csv")
    np.testing.assert_array_equal(X[:, 0], a)
    np.testing.assert_array_equal(y, b)


def test_dataset_column_order_and_errors(tmp_path):
    (tmp_path / "d.csv").write_text("y,x2,x1\n1,2,3\n")
    X, y = read_dataset(tmp_path / "d.csv")
    np.testing.assert_array_equal(X, [[3.0, 2.0]])
    (tmp_path / "e.csv").write_text("x1,y\n1,2\n3\n")
    with pytest.raises(InputError, match="line 3"):
        read_dataset(tmp_path / "e.csv")
    (tmp_path / "f.csv").write_text("y\n1\n")
    with pytest.raises(InputError, match="x1"):
        read_dataset(tmp_path / "f.csv")
    with pytest.raises(InputError):
        read_dataset(tmp_path / "missing.csv")


def test_inputs_header_only(tmp_path):
    (tmp_path / "i.csv").write_text("x1,x2\n")
    assert read_inputs(tmp_path / "i.csv", 2).shape == (0, 2)


def test_model_round_trip(tmp_path):
    k = StationaryGSK("matern52", [1.5], [[0.5, 2.0]], [[0.1, 0.0]])
    X = np.arange(6.0).reshape(3, 2)
    y = np.array([0.1, -0.2, 0.3])
    write_json(tmp_path / "m.json", model_to_dict(k, 0.2, X, y, 1.5))
    k2, noise, X2, y2, off = load_model(tmp_path / "m.json")
    np.testing.assert_array_equal(k2(X), k(X))
    assert (noise, off) == (0.2, 1.5)
    np.testing.assert_array_equal(X2, X)
    np.testing.assert_array_equal(y2, y)


def test_run_report_round_trip(tmp_path):
    rep = RunReport(["approx", "--seed=1"], {"family": "ns-se"}, 1, {"normalized_rmse": 0.1}, [[3.0, 2.0]], 1.25, {"r": "x"})
    rep.save(tmp_path / "r.json")
    assert RunReport.load(tmp_path / "r.json") == rep
    with pytest.raises(InputError):
        RunReport.from_dict({"command": []})
