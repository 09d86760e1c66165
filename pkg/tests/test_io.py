import numpy as np
import pytest

from kmcluster.core import UsageError
from kmcluster.io import (
    format_report,
    load_bundled_base,
    read_csv,
    write_labels,
    write_table,
)


def test_read_csv_with_truth(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text(',a,b,status\n1,0.5,2,genuine\n2,1.5,3,counterfeit\n3,2,4,genuine\n')
    ds = read_csv(p, "status")
    assert ds.feature_names == ["a", "b"]
    assert ds.data.tolist() == [[0.5, 2.0], [1.5, 3.0], [2.0, 4.0]]
    assert ds.truth.tolist() == [0, 1, 0] and ds.truth_levels == ["genuine", "counterfeit"]


@pytest.mark.parametrize(
    "text, col",
    [("a,b\n1,x\n", None), ("a,b\n1,2\n", "c"), ("a\n", None), ("a,b\n1\n", None)],
)
def test_read_csv_errors(tmp_path, text, col):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(UsageError):
        read_csv(p, col)


def test_read_missing_file(tmp_path):
    with pytest.raises(UsageError):
        read_csv(tmp_path / "nope.csv")


def test_float_roundtrip(tmp_path, rng):
    vals = rng.normal(size=50) * 10.0 ** rng.integers(-8, 8, size=50)
    p = tmp_path / "t.csv"
    write_table(p, ["v"], [(v,) for v in vals])
    assert np.array_equal(read_csv(p).data[:, 0], vals)


def test_labels_file(tmp_path):
    p = tmp_path / "l.csv"
    write_labels(p, np.array([0, 0, 1]))
    assert p.read_text() == "row,label\n0,1\n1,1\n2,2\n"


def test_format_report():
    assert format_report({"a": 1, "b": 0.1, "c": [1, 2]}) == "a: 1\nb: 0.1\nc: 1 2\n"


def test_bundled_base():
    ds = load_bundled_base()
    assert ds.data.shape == (200, 6)
    assert np.bincount(ds.truth).tolist() == [100, 100]
