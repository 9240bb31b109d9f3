import pytest
from hypothesis import given, settings, strategies as st

from jetvar.errors import DegreeZero
from jetvar.jetforms import (
    Form,
    VectorField,
    contract,
    d_H,
    d_total,
    d_V,
    horizontalize,
    prolong,
    to_dy_basis,
    total_d_function,
    wedge,
)
from jetvar.symexpr import JetSpace, cos, sin

from strategies import SPACE_2, exprs

sp1 = JetSpace(1, 1, 6, ("t",), ("y",))
y, yd = sp1.y(0), sp1.y(0, 0)


@st.composite
def forms(draw, space=SPACE_2, degree=None):
    degree = draw(st.integers(0, 2)) if degree is None else degree
    basis = [Form.dx(space, mu) for mu in range(space.n)]
    basis += [Form.theta(space, a, multi) for a in range(space.m) for multi in space.multi_indices(1)]
    out = Form.zero(space, degree)
    for _ in range(draw(st.integers(1, 2))):
        piece = Form.function(space, draw(exprs(space, 1)))
        for _ in range(degree):
            piece = wedge(piece, draw(st.sampled_from(basis)))
        out = out + piece
    return out


@settings(max_examples=30, deadline=None)
@given(forms())
def test_d_H_squared_zero(a):
    assert d_H(d_H(a)).is_zero


@settings(max_examples=30, deadline=None)
@given(forms())
def test_d_V_squared_zero(a):
    assert d_V(d_V(a)).is_zero


@settings(max_examples=30, deadline=None)
@given(forms())
def test_differentials_anticommute(a):
    assert (d_H(d_V(a)) + d_V(d_H(a))).is_zero


@settings(max_examples=30, deadline=None)
@given(forms(degree=1), forms(degree=1), forms(degree=0))
def test_wedge_graded_commutative_and_associative(a, b, c):
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@settings(max_examples=25, deadline=None)
@given(forms(degree=1), forms())
def test_d_H_is_antiderivation(a, b):
    assert d_H(wedge(a, b)) == wedge(d_H(a), b) - wedge(a, d_H(b))


@settings(max_examples=20, deadline=None)
@given(forms(degree=1), forms(degree=1))
def test_contraction_is_antiderivation(a, b):
    X = VectorField(SPACE_2, [1, SPACE_2.x(0)], [SPACE_2.y(1), SPACE_2.y(0, 1)])
    assert contract(X, wedge(a, b)) == wedge(contract(X, a), b) - wedge(a, contract(X, b))


def test_horizontal_part_of_dy():
    assert horizontalize(Form.dy(sp1, 0)) == yd * Form.dx(sp1, 0)


def test_contact_contraction_examples():
    assert contract(VectorField(sp1, [0], [1]), Form.theta(sp1, 0)) == Form.function(sp1, 1)
    X = VectorField(sp1, [1], [0])
    assert contract(X, Form.theta(sp1, 0)).scalar() == -yd
    with pytest.raises(DegreeZero):
        contract(X, Form.function(sp1, y))


def test_prolongation_of_time_translation_vanishes():
    assert all(v.is_zero for v in prolong(VectorField(sp1, [1], [0]), 3).values())


def test_prolongation_of_scaling():
    pr = prolong(VectorField(sp1, [0], [y]), 2)
    assert pr[(0, (0,))] == yd and pr[(0, (0, 0))] == sp1.y(0, 0, 0)


def test_exterior_derivative_of_function_in_dy_basis():
    df = total_d_function(sin(y) * sp1.x(0), sp1)
    words = to_dy_basis(df)
    assert words[(("dx", 0),)] == sin(y)
    assert words[(("dy", 0),)] == sp1.x(0) * cos(y)


def test_dy_basis_rejects_jet_dependence():
    with pytest.raises(ValueError):
        to_dy_basis(yd * Form.dx(sp1, 0))


def test_total_differential_squares_to_zero():
    f = Form.function(sp1, y * yd)
    assert d_total(d_total(f)).is_zero
