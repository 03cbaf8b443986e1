import json
import math

import pytest
from hypothesis import given, strategies as st

from pspin_hessian.errors import InvalidSpec
from pspin_hessian.mixture import (MixtureClass, MixtureSpec, derive_moments,
                                   e_inf_thresholds, g_function, xi_derivative, xi_eval)

MIX34 = MixtureSpec.from_squared({3: 0.5, 4: 0.5})


def test_xi_normalized_at_one():
    assert xi_eval(MIX34, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_xi_pure_cube():
    assert xi_eval(MixtureSpec.pure(3), 0.5) == pytest.approx(0.125, abs=1e-15)


def test_xi_odd_even_cancel():
    spec = MixtureSpec.from_squared({2: 0.5, 3: 0.5})
    assert xi_eval(spec, -1.0) == pytest.approx(0.0, abs=1e-15)


def test_derivatives_match_polynomial():
    assert xi_derivative(MIX34, 1.0, 1) == pytest.approx(3.5)
    assert xi_derivative(MIX34, 1.0, 2) == pytest.approx(9.0)
    assert xi_derivative(MIX34, 0.5, 1) == pytest.approx(0.5 * 3 * 0.25 + 0.5 * 4 * 0.125)


def test_pure3_moments():
    m = derive_moments(MixtureSpec.pure(3))
    assert (m.xip, m.xipp) == pytest.approx((3.0, 6.0))
    assert m.g_value == pytest.approx(math.log(2) - 2 / 3, abs=1e-12)
    assert m.klass is MixtureClass.PURE_LIKE


@pytest.mark.parametrize("p", range(3, 12))
def test_pure_g_closed_form(p):
    m = derive_moments(MixtureSpec.pure(p))
    assert m.g_value == pytest.approx(math.log(p - 1) - 2 * (p - 2) / p, abs=1e-12)


def test_pure2_is_critical():
    m = derive_moments(MixtureSpec.pure(2))
    assert m.g_value == 0.0
    assert m.klass.value == "Critical"


def test_full_mixture_sign():
    m = derive_moments(MixtureSpec.from_squared({2: 0.95, 4: 0.05}))
    assert (m.xip, m.xipp) == pytest.approx((2.1, 2.5))
    # frozen mpmath evaluation of G at 40 digits
    assert m.g_value == pytest.approx(-1.5908451055e-4, rel=1e-8)
    assert m.klass.value == "Full"


def test_mixed34_pure_like():
    m = derive_moments(MIX34)
    assert m.g_value == pytest.approx(0.058974, abs=1e-6)
    assert m.klass.value == "PureLike"


def test_thresholds():
    pure, prime, mixed = e_inf_thresholds(MixtureSpec.pure(3))
    assert pure == pytest.approx(2 * math.sqrt(2 / 3))
    assert prime == pytest.approx(2 * math.sqrt(6) / 3)
    none, _, mixed34 = e_inf_thresholds(MIX34)
    assert none is None
    assert mixed34 == pytest.approx(17.75 / 10.5)


@pytest.mark.parametrize("coeffs", [{1: 1.0}, {3: -0.5, 4: 1.5}, {3: 0.0}, {3: 0.7}])
def test_invalid_specs(coeffs):
    with pytest.raises(InvalidSpec):
        MixtureSpec.from_squared(coeffs)


def test_parse_forms_agree():
    a = MixtureSpec.parse("3:0.5,4:0.5")
    b = MixtureSpec.from_json({"gamma3": 0.5, "gamma4": 0.5})
    c = MixtureSpec.parse(json.dumps({"gamma3": 0.5, "gamma4": 0.5}))
    assert a == b == c
    assert MixtureSpec.parse("3") == MixtureSpec.pure(3)


def test_json_roundtrip():
    spec = MixtureSpec.from_squared({2: 0.25, 5: 0.75})
    again = MixtureSpec.from_json(json.loads(json.dumps(spec.to_json())))
    for p in spec.degrees:
        assert again.gamma2[p] == pytest.approx(spec.gamma2[p], abs=1e-15)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4),
       st.floats(-1.0, 1.0))
def test_g_sign_matches_class(weights, x):
    total = sum(weights)
    spec = MixtureSpec.from_squared({p: w / total for p, w in zip(range(2, 6), weights)})
    m = derive_moments(spec)
    assert m.g_value == g_function(m.xip, m.xipp)
    assert abs(xi_eval(spec, x)) <= 1.0 + 1e-12
