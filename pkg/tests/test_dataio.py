import numpy as np
import pytest

from smoothkit.dataio import Dataset, FitCurve, emit_curve, load_csv, read_curve, read_table, write_table
from smoothkit.errors import ColumnError, DataError, ParseError, SizeError


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_three_rows(tmp_path):
    d = load_csv(_write(tmp_path, "y,x\n1,2\n3,4\n5,6\n"), "y")
    assert (d.n, d.k) == (3, 1)
    np.testing.assert_array_equal(d.y, [1, 3, 5])
    np.testing.assert_array_equal(d.X[:, 0], [2, 4, 6])
    assert d.names == ("x",)


def test_parse_error_cites_row_and_column(tmp_path):
    with pytest.raises(ParseError) as err:
        load_csv(_write(tmp_path, "y,x\n1,2\n3,abc\n5,6\n"), "y")
    assert err.value.row == 2
    assert err.value.column == "x"
    assert "row 2" in str(err.value) and "column x" in str(err.value)


def test_factor_mask(tmp_path):
    d = load_csv(_write(tmp_path, "wage,female,educ\n1,0,12\n2,1,16\n3,1,10\n"), "wage", ["female"])
    assert d.factor_mask == (True, False)


def test_factor_must_be_binary(tmp_path):
    with pytest.raises(DataError):
        load_csv(_write(tmp_path, "y,f\n1,0\n2,2\n"), "y", ["f"])


def test_missing_column(tmp_path):
    with pytest.raises(ColumnError, match="resp"):
        load_csv(_write(tmp_path, "y,x\n1,2\n3,4\n"), "resp")


def test_too_few_rows(tmp_path):
    with pytest.raises(SizeError):
        load_csv(_write(tmp_path, "y,x\n1,2\n"), "y")


def test_covariates_keep_file_order(tmp_path):
    d = load_csv(_write(tmp_path, "b,y,a\n1,2,3\n4,5,6\n"), "y")
    assert d.names == ("b", "a")
    np.testing.assert_array_equal(d.X, [[1, 3], [4, 6]])


def test_dataset_rejects_nonfinite():
    with pytest.raises(DataError):
        Dataset.from_xy([0.0, np.nan], [1.0, 2.0])


def test_dataset_is_immutable():
    d = Dataset.from_xy([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        d.y[0] = 5.0
    with pytest.raises(AttributeError):
        d.y = np.zeros(2)


def _curve(m, deriv=True):
    grid = np.linspace(0.1, 0.9, m) ** 1.3
    fit = np.sin(grid * 7.123456789)
    se = 0.1 + grid / 3
    return FitCurve.from_se(grid, fit, se, np.cos(grid) / 3 if deriv else None)


def test_emit_two_point_curve(tmp_path):
    p = tmp_path / "c.tsv"
    emit_curve(_curve(2), p)
    lines = p.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].split("\t") == ["grid", "fit", "se", "lower", "upper", "deriv"]


def test_emit_without_deriv_has_five_columns(tmp_path):
    p = tmp_path / "c.tsv"
    emit_curve(_curve(4, deriv=False), p)
    assert all(len(line.split("\t")) == 5 for line in p.read_text().splitlines())


def test_emit_roundtrip_exact(tmp_path):
    c = _curve(50)
    p = tmp_path / "c.tsv"
    emit_curve(c, p)
    back = read_curve(p)
    for name in ("grid", "fit", "se", "lower", "upper", "deriv"):
        np.testing.assert_array_equal(getattr(back, name), getattr(c, name))


def test_load_then_emit_reproduces_input(tmp_path):
    rng = np.random.default_rng(4)
    vals = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-8, 8, size=(20, 3))
    lines = ["y,a,b"] + [",".join(repr(float(v)) for v in row) for row in vals]
    d = load_csv(_write(tmp_path, "\n".join(lines) + "\n"), "y")
    out = tmp_path / "raw.tsv"
    write_table(out, {"y": d.y, "a": d.X[:, 0], "b": d.X[:, 1]})
    t = read_table(out)
    np.testing.assert_array_equal(np.c_[t["y"], t["a"], t["b"]], vals)


def test_curve_invariants_enforced():
    with pytest.raises(DataError):
        FitCurve([0.0, 0.0], [1, 1], [0, 0], [1, 1], [1, 1])
    with pytest.raises(DataError):
        FitCurve([0.0, 1.0], [1, 1], [0, 0], [2, 1], [1, 1])


def test_emit_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_curve(_curve(3), tmp_path / "missing-dir" / "c.tsv")
