import numpy as np
import pytest
from hypothesis import given, strategies as st

from paretoproc.errors import DomainError, GridMismatch
from paretoproc.grid import (
    Field,
    Grid,
    combine,
    field_from_csv,
    field_from_json,
    field_to_csv,
    field_to_json,
    inf_field,
    sup_field,
)


@pytest.fixture
def grid3():
    return Grid(np.array([0.0, 0.5, 1.0]))


def test_sup_field_direct_maximum(grid3):
    assert sup_field(Field(grid3, [1.0, 3.0, 2.0])) == (3.0, 1)


def test_sup_field_tie_broken_by_smallest_index(grid3):
    assert sup_field(Field(grid3, [5.0, 5.0, 5.0])) == (5.0, 0)


def test_sup_field_negative_values_allowed():
    g = Grid(np.array([0.0, 1.0]))
    assert sup_field(Field(g, [-2.0, -7.0])) == (-2.0, 0)


def test_inf_field_examples(grid3):
    assert inf_field(Field(grid3, [1.0, 3.0, 2.0])) == (1.0, 0)
    g2 = Grid(np.array([0.0, 1.0]))
    assert inf_field(Field(g2, [0.0, 0.0])) == (0.0, 0)
    assert inf_field(Field(grid3, [4.0, -1.0, 7.0])) == (-1.0, 1)


def test_combine_min_and_pow():
    g = Grid(np.array([0.0, 1.0]))
    out = combine(Field(g, [1.0, 2.0]), Field(g, [2.0, 1.0]), "min")
    assert np.array_equal(out.values, [1.0, 1.0])
    out = combine(Field(g, [2.0, 3.0]), Field(g, [2.0, 2.0]), "pow")
    assert np.array_equal(out.values, [4.0, 9.0])


def test_combine_division_by_zero_raises():
    g = Grid(np.array([0.0, 1.0]))
    with pytest.raises(DomainError):
        combine(Field(g, [1.0, 1.0]), Field(g, [0.0, 1.0]), "div")


def test_combine_negative_base_fractional_exponent_raises():
    g = Grid(np.array([0.0, 1.0]))
    with pytest.raises(DomainError):
        combine(Field(g, [-2.0, 1.0]), Field(g, [0.5, 1.0]), "pow")


def test_combine_grid_mismatch():
    f = Field(Grid(np.array([0.0, 1.0])), [1.0, 2.0])
    g = Field(Grid(np.array([0.0, 2.0])), [1.0, 2.0])
    with pytest.raises(GridMismatch):
        combine(f, g, "add")


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=8),
    st.data(),
)
def test_sup_of_max_combination(values, data):
    other = data.draw(
        st.lists(st.floats(-1e6, 1e6), min_size=len(values), max_size=len(values))
    )
    g = Grid(np.arange(float(len(values))))
    f1, f2 = Field(g, values), Field(g, other)
    combined = combine(f1, f2, "max")
    assert sup_field(combined).value == max(sup_field(f1).value, sup_field(f2).value)


def test_grid_invariants():
    with pytest.raises(ValueError):
        Grid(np.array([1.0]))  # fewer than 2 sites
    with pytest.raises(ValueError):
        Grid(np.array([1.0, 1.0]))  # duplicate sites
    with pytest.raises(ValueError):
        Field(Grid(np.array([0.0, 1.0])), [np.nan, 1.0])


def test_immutability():
    g = Grid(np.array([0.0, 1.0]))
    f = Field(g, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 5.0
    with pytest.raises(ValueError):
        g.sites[0, 0] = 5.0


def test_csv_roundtrip(tmp_path):
    g = Grid(np.array([[0.0, 0.0], [0.5, 1.0], [1.0, 2.0]]))
    f = Field(g, [1.25, -0.5, 3.0])
    path = tmp_path / "field.csv"
    field_to_csv(f, path)
    header = path.read_text().splitlines()[0]
    assert header == "site_index,coord_1,coord_2,value"
    back = field_from_csv(path)
    assert np.array_equal(back.values, f.values)
    assert np.array_equal(back.grid.sites, g.sites)


def test_json_roundtrip():
    g = Grid(np.array([0.0, 0.25, 1.0]))
    f = Field(g, [0.0, 1.5, 2.5])
    back = field_from_json(field_to_json(f))
    assert np.array_equal(back.values, f.values)
    assert np.array_equal(back.grid.sites, g.sites)
