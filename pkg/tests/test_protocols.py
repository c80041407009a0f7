import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sshtransfer.core import ChainSpec
from sshtransfer.protocols import (
    Cosine,
    Exponential,
    Static,
    TrivialLinear,
    couplings_at,
    couplings_derivative_at,
    min_gap,
    parse_protocol,
)

C31 = ChainSpec(31)
ALL = [Exponential(C31), Cosine(C31), TrivialLinear(C31)]


def test_exponential_start():
    j = couplings_at(Exponential(C31, 6.0), 0.0, 10.0)
    np.testing.assert_array_equal(j[0::2], 0.0)
    np.testing.assert_allclose(j[1::2], 1.0, rtol=1e-15)


def test_exponential_midpoint():
    j = couplings_at(Exponential(C31, 6.0), 5.0, 10.0)
    # (1 - e^-3) / (1 - e^-6) = 1 / (1 + e^-3)
    np.testing.assert_allclose(j, 1.0 / (1.0 + math.exp(-3.0)), rtol=1e-14)
    assert j[0] == pytest.approx(0.95257, abs=1e-5)


def test_cosine_midpoint():
    np.testing.assert_allclose(couplings_at(Cosine(C31, 0.5), 5.0, 10.0), 0.5, atol=1e-15)


def test_trivial_midpoint():
    j = couplings_at(TrivialLinear(C31), 5.0, 10.0)
    assert j[0] == j[-1] == 0.5
    np.testing.assert_array_equal(j[1:-1], 1.0)


@pytest.mark.parametrize("p", ALL, ids=lambda p: type(p).__name__)
def test_boundary_conditions(p):
    assert couplings_at(p, 0.0, 7.0)[0] == 0.0
    assert couplings_at(p, 7.0, 7.0)[-1] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("p", ALL, ids=lambda p: type(p).__name__)
def test_normalization(p):
    s = np.linspace(0, 1, 2001)
    assert p.profile(s).max() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", ALL[:2], ids=lambda p: type(p).__name__)
@given(st.floats(0, 1))
def test_mirror_symmetry(p, s):
    a = p.profile([s])[0]
    b = p.profile([1.0 - s])[0]
    np.testing.assert_allclose(a[0::2], b[1::2], atol=1e-14)
    np.testing.assert_allclose(a[1::2], b[0::2], atol=1e-14)


@given(st.floats(0, 1))
def test_trivial_interior_constant(s):
    np.testing.assert_array_equal(TrivialLinear(C31).profile([s])[0, 1:-1], 1.0)


def test_derivative_examples():
    t_star = 20.0
    a = 6.0
    r = couplings_derivative_at(Exponential(C31, a), 0.0, t_star)
    assert r[0] == pytest.approx(a / (t_star * (1 - math.exp(-a))), rel=1e-14)
    r = couplings_derivative_at(Cosine(C31, 0.5), t_star / 2, t_star)
    assert r[0] == pytest.approx(0.5 * math.pi / t_star, rel=1e-14)
    r = couplings_derivative_at(TrivialLinear(C31), 3.0, t_star)
    assert r[0] == 1 / t_star and r[-1] == -1 / t_star
    assert np.all(r[1:-1] == 0)


@pytest.mark.parametrize("p", ALL, ids=lambda p: type(p).__name__)
def test_derivative_second_order_fd(p):
    t_star, t = 13.0, 4.1
    exact = couplings_derivative_at(p, t, t_star)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (couplings_at(p, t + h, t_star) - couplings_at(p, t - h, t_star)) / (2 * h)
        errs.append(np.max(np.abs(fd - exact)))
    if errs[0] < 1e-12:  # linear profile: exact already
        return
    assert errs[1] / errs[0] == pytest.approx(0.25, abs=0.02)


def test_time_outside_range():
    with pytest.raises(ValueError):
        couplings_at(ALL[0], -0.1, 1.0)
    with pytest.raises(ValueError):
        couplings_at(ALL[0], 1.5, 1.0)
    with pytest.raises(ValueError):
        couplings_derivative_at(ALL[0], 2.0, 1.0)


@pytest.mark.parametrize("cls", [Exponential, Cosine, TrivialLinear])
def test_even_chain_rejected(cls):
    with pytest.raises(ValueError):
        cls(ChainSpec(30))


class TestMinGap:
    def test_exponential(self):
        g, t = min_gap(Exponential(C31), 1.0, 1001)
        j = 1 / (1 + math.exp(-3))
        assert g == pytest.approx(2 * j * math.cos(15 * math.pi / 32), abs=1e-10)
        assert t == pytest.approx(0.5)

    def test_cosine(self):
        g, t = min_gap(Cosine(C31), 1.0, 1001)
        assert g == pytest.approx(math.cos(15 * math.pi / 32), abs=1e-10)
        assert t == pytest.approx(0.5)

    def test_trivial(self):
        g, t = min_gap(TrivialLinear(C31), 1.0, 1001)
        assert g == pytest.approx(0.1, abs=0.01)
        assert t < 0.02 or t > 0.98

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            min_gap(ALL[0], 1.0, 2)


class TestParse:
    def test_kinds(self):
        assert parse_protocol("exponential alpha=4", C31) == Exponential(C31, 4.0)
        assert parse_protocol("cosine", C31) == Cosine(C31, 0.5)
        assert parse_protocol("trivial", C31) == TrivialLinear(C31)
        assert parse_protocol("uniform j=0.5", ChainSpec(3)) == Static(ChainSpec(3), (0.5, 0.5))

    @pytest.mark.parametrize("text", ["", "linear", "cosine alpha=3", "exponential alpha"])
    def test_errors(self, text):
        with pytest.raises(ValueError):
            parse_protocol(text, C31)
