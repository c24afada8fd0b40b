import numpy as np
import pytest

from dpmix import errors
from dpmix.data import DataMatrix, ingest_csv, repr_float, standardize, write_matrix_csv


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_small_table(tmp_path):
    d = ingest_csv(_write(tmp_path, "a,b\n1,2\n3,4\n5,6\n"))
    assert (d.n, d.d) == (3, 2)
    assert d.feature_names == ("a", "b")
    assert np.array_equal(d.x, [[1, 2], [3, 4], [5, 6]])


def test_label_and_id_columns(tmp_path):
    p = _write(tmp_path, "id\tg1\tg2\tclass\ns1\t1\t2\tALL\ns2\t3\t4\tAML\n", "d.tsv")
    d = ingest_csv(p, label_column="class", id_column="id")
    assert d.sample_ids == ("s1", "s2")
    assert list(d.labels) == ["ALL", "AML"]
    assert d.d == 2


def test_no_header(tmp_path):
    d = ingest_csv(_write(tmp_path, "1,2,0\n3,4,1\n"), has_header=False, label_column="2")
    assert d.d == 2 and list(d.labels) == ["0", "1"]


def test_non_numeric_location(tmp_path):
    with pytest.raises(errors.NonNumericCell) as info:
        ingest_csv(_write(tmp_path, "a,b\n1,2\n3,abc\n"))
    assert (info.value.row, info.value.col) == (3, 2)


@pytest.mark.parametrize("cell", ["nan", "inf", "-inf"])
def test_non_finite(tmp_path, cell):
    with pytest.raises(errors.ParseError):
        ingest_csv(_write(tmp_path, "a,b\n1,%s\n" % cell))


def test_ragged(tmp_path):
    with pytest.raises(errors.RaggedRows) as info:
        ingest_csv(_write(tmp_path, "a,b\n1,2\n3\n"))
    assert info.value.row == 3


def test_empty(tmp_path):
    with pytest.raises(errors.ParseError):
        ingest_csv(_write(tmp_path, ""))


def test_standardize_flag(tmp_path, rng):
    x = rng.normal(3.0, 2.0, size=(20, 4))
    p = tmp_path / "x.csv"
    write_matrix_csv(p, x, header=["a", "b", "c", "d"])
    d = ingest_csv(p, standardize=True)
    assert np.allclose(d.x.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(d.x.std(axis=0), 1, atol=1e-12)
    assert np.array_equal(ingest_csv(p).x, x)  # 17 significant digits round-trip exactly
    assert np.allclose(standardize(x), d.x)


def test_matrix_is_read_only():
    d = DataMatrix(np.ones((3, 2)))
    with pytest.raises(ValueError):
        d.x[0, 0] = 2.0
    with pytest.raises(errors.InputError):
        DataMatrix(np.array([[1.0, np.nan]]))
    with pytest.raises(errors.InputError):
        DataMatrix(np.ones((3, 2)), labels=[1, 2])


def test_repr_float_roundtrip(rng):
    for v in rng.normal(size=50) * 10.0 ** rng.integers(-30, 30, size=50):
        assert float(repr_float(v)) == v
