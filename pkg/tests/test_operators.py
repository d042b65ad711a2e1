import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticity.algebra import GaussianRational, I, MultiPoly, homogeneity_degree, variables
from ellipticity.operators import (
    CATALOG,
    Direction,
    Operator,
    OperatorError,
    OperatorParseError,
    adjoint,
    catalog,
    catalog_names,
    parse_dsl,
    parse_json,
    parse_operator,
    plane_slice,
    resultant_P,
    symbol_matrix,
    wedge_power,
)

CATALOG_CASES = [
    ("gradient", {"n": 2}),
    ("gradient", {"n": 3, "N": 2}),
    ("kth_gradient", {"n": 2, "k": 2}),
    ("divergence", {"n": 3}),
    ("laplacian", {"n": 2}),
    ("cauchy_riemann", {"n": 2}),
    ("symmetric_gradient", {"n": 2}),
    ("symmetric_gradient", {"n": 3}),
    ("dev_symmetric_gradient", {"n": 2}),
    ("dev_symmetric_gradient", {"n": 3}),
    ("directional_example", {"n": 3, "N": 3}),
]


def G(x):
    return GaussianRational.coerce(x)


def test_dsl_cauchy_riemann():
    op = parse_dsl("w1 = d1 u1 - d2 u2 ; w2 = d2 u1 + d1 u2")
    assert (op.n, op.k, op.dim_v, op.dim_w) == (2, 1, 2, 2)
    assert op.term_dict == catalog("cauchy_riemann").term_dict


def test_json_laplacian():
    src = json.dumps({"n": 2, "k": 2, "dim_v": 1, "dim_w": 1, "terms": [
        {"alpha": [2, 0], "matrix": [["1"]]}, {"alpha": [0, 2], "matrix": [["1"]]}]})
    op = parse_operator(src)
    assert op.term_dict == catalog("laplacian", n=2).term_dict


def test_dsl_syntax_error_has_location():
    with pytest.raises(OperatorParseError) as info:
        parse_dsl("w1 = d1 u1 + d1 u2 u3")
    assert info.value.line == 1 and info.value.column is not None


def test_dsl_mixed_order_rejected():
    with pytest.raises(OperatorError):
        parse_dsl("w1 = d1 u1 + d1 d2 u1")


def test_symbol_examples():
    x1, x2 = variables(2)
    lap = symbol_matrix(catalog("laplacian", n=2))
    assert lap.entries == ((x1 * x1 + x2 * x2,),)
    cplx = symbol_matrix(catalog("laplacian", n=2), Direction.parse("0,1"))
    assert cplx[0, 0] == x1 * x1 + x2 * x2 - MultiPoly.constant(2, 1) + x2.scale(2 * I)
    grad = symbol_matrix(catalog("gradient", n=2))
    assert grad.entries == ((x1,), (x2,))


def test_adjoint_examples():
    grad = catalog("gradient", n=2)
    adj = adjoint(grad)
    assert adj.dim_v == 2 and adj.dim_w == 1
    assert adj.coefficient((1, 0)) == ((G(-1), G(0)),)
    lap = catalog("laplacian", n=2)
    assert adjoint(lap).term_dict == lap.term_dict


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_adjoint_involution(name, params):
    op = catalog(name, **params)
    assert adjoint(adjoint(op)).term_dict == op.term_dict


def test_wedge_power_examples():
    cr = catalog("cauchy_riemann")
    w = wedge_power(cr, 2)
    assert (w.dim_v, w.dim_w, w.k) == (1, 1, 2)
    assert w.symbol_at([1, 0]) == [[G(1)]]
    sym = wedge_power(catalog("symmetric_gradient", n=2), 2)
    assert sym.k == 2


def test_wedge_top_power_is_determinant():
    cr = catalog("cauchy_riemann")
    w = wedge_power(cr, 2)
    for xi in ([Fraction(1, 2), 3], [2, -1], [Fraction(-3, 7), Fraction(5, 3)], [0, 1], [4, 4]):
        m = cr.symbol_at(xi)
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        assert w.symbol_at(xi)[0][0] == det


def _p_example():
    # (d1^2, d2^2, d1 d2) on R^2
    return parse_dsl("w1 = d1 d1 u1 ; w2 = d2 d2 u1 ; w3 = d1 d2 u1")


def test_resultant_degree_k_squared():
    op = _p_example()
    p = resultant_P(op, Direction.parse("0,1"), [2, 3, 5], [0, 1, 0])
    assert not p.is_zero()
    assert homogeneity_degree(p) == 4


def test_resultant_identical_vanishes():
    op = _p_example()
    assert resultant_P(op, Direction.parse("0,1"), [0, 1, 0], [0, 1, 0]).is_zero()


def test_resultant_shared_root():
    # at xi' = 1 the normal polynomial of w0 = (0,1,0) is t^2 (root t = 0);
    # w = (0, 0, 1) gives xi1 * t, which shares that root
    op = _p_example()
    p = resultant_P(op, Direction.parse("0,1"), [0, 0, 1], [0, 1, 0])
    assert p.evaluate_exact([1]).is_zero()


def test_plane_slice_examples():
    lap3 = catalog("laplacian", n=3)
    s = plane_slice(lap3, [1, 0, 0], [0, 1, 0])
    x1, x2 = variables(2)
    assert symbol_matrix(s).entries == ((x1 * x1 + x2 * x2,),)
    d = catalog("directional_example", n=3, N=3)
    sd = plane_slice(d, [1, 0, 0], [0, 1, 0])
    m = sd.symbol_at([1, 0])
    # the first two rows carry the Cauchy-Riemann block d1 u1 - d2 u2, d2 u1 + d1 u2
    assert [r[:2] for r in m[:2]] == [[G(1), G(0)], [G(0), G(1)]]
    assert [r[:2] for r in sd.symbol_at([0, 1])[:2]] == [[G(0), G(-1)], [G(1), G(0)]]
    sl = plane_slice(lap3, [1, 0, 0], [1, 1, 0])
    assert sl.symbol_at([1, 0]) == lap3.symbol_at([1, 0, 0])


def test_catalog_symbol_conventions():
    sym = catalog("symmetric_gradient", n=2)
    m = sym.symbol_at([1, 0])
    assert [sum((a * b for a, b in zip(row, [G(0), G(1)])), G(0)) for row in m] == [G(0), G(Fraction(1, 2)), G(0)]
    dev = catalog("dev_symmetric_gradient", n=2)
    m = dev.symbol_at([1, 0])
    assert [row[0] for row in m] == [G(Fraction(1, 2)), G(0), G(Fraction(-1, 2))]
    d = catalog("directional_example", n=3, N=3)
    assert d.coefficient((1, 0, 0))[0][:2] == (G(1), G(0))
    assert d.coefficient((0, 1, 0))[0][:2] == (G(0), G(-1))


def test_unknown_catalog_and_parameters():
    with pytest.raises(OperatorError):
        catalog("nope")
    with pytest.raises(OperatorError):
        catalog("laplacian", n=2, q=3)
    assert set(catalog_names()) == set(CATALOG)


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_round_trip_and_order(name, params):
    op = catalog(name, **params)
    back = parse_json(op.to_json())
    assert back.term_dict == op.term_dict and back.n == op.n and back.k == op.k
    assert all(sum(alpha) == op.k for alpha in op.term_dict)


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_complexified_symbol_at_zero(name, params):
    op = catalog(name, **params)
    nu = Direction(tuple(Fraction(j + 1, 3) for j in range(op.n)))
    pm = symbol_matrix(op, nu)
    at0 = pm.evaluate_exact([0] * op.n)
    direct = op.symbol_at(list(nu.components))
    ik = I ** op.k
    assert at0 == [[ik * x for x in row] for row in direct]


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG_CASES), st.lists(rationals, min_size=3, max_size=3))
def test_symbol_matrix_matches_terms(case, xi):
    op = catalog(case[0], **case[1])
    xi = xi[:op.n] + [Fraction(1)] * (op.n - len(xi))
    pm = symbol_matrix(op)
    assert pm.evaluate_exact(xi) == op.symbol_at(xi)


def test_direction_rejects_floats_and_zero():
    with pytest.raises(OperatorError):
        Direction.parse("0.6,0.8")
    with pytest.raises(OperatorError):
        Direction.parse("0,0")
    assert Direction.parse("3/5,4/5").is_unit()


def test_operator_is_validated_eagerly():
    with pytest.raises(OperatorError):
        Operator.from_dict(2, 1, 1, 1, {(2, 0): [[1]]})
