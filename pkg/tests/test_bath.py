from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairanneal.bath import BathConfig, collective_coupling, coupling_stack, gamma, reduced_longitudinal
from pairanneal.errors import ConfigError
from pairanneal.model import Ancilla, Conventional, all_ones, to_sector_frame
from pairanneal.operators import pauli_on
from pairanneal.verify import check_cancellation

BATH = BathConfig()


def test_zero_frequency_limit():
    assert abs(gamma(0.0, BATH) - 0.314) < 1e-12


@pytest.mark.parametrize("w", [0.5, 1.0, 5.0, 20.0])
def test_detailed_balance(w):
    assert gamma(-w, BATH) == pytest.approx(math.exp(-BATH.beta * w) * gamma(w, BATH), rel=1e-12)


def test_cutoff_suppression():
    assert gamma(100 * BATH.omega_c, BATH) < 1e-30


def test_continuity_at_zero():
    assert gamma(1e-9, BATH) == pytest.approx(gamma(0.0, BATH), rel=1e-8)
    assert gamma(-1e-9, BATH) == pytest.approx(gamma(0.0, BATH), rel=1e-8)


def test_array_input():
    w = np.array([[-1.0, 0.0], [1.0, 2.0]])
    out = gamma(w, BATH)
    assert out.shape == (2, 2)
    assert out[0, 1] == gamma(0.0, BATH)


@settings(max_examples=60, deadline=None)
@given(w=st.floats(-500, 500), beta=st.floats(0.01, 10), eta=st.floats(1e-3, 5),
       wc=st.floats(0.5, 100))
def test_rates_nonnegative(w, beta, eta, wc):
    assert gamma(w, BathConfig(beta=beta, eta=eta, omega_c=wc)) >= 0.0


@pytest.mark.parametrize("bad", [dict(beta=0.0), dict(eta=-1.0), dict(omega_c=math.inf),
                                 dict(gz=math.nan)])
def test_bath_validation(bad):
    with pytest.raises(ConfigError):
        BathConfig(**bad)


def test_coupling_list_length_checked():
    with pytest.raises(ConfigError):
        collective_coupling("z", BathConfig(gz=(0.1, 0.1, 0.1)), Ancilla(), 2)


def test_two_site_sum():
    g = 0.3
    c = collective_coupling("z", BathConfig(gz=g), Ancilla(), 1)
    assert np.array_equal(c, g * (pauli_on(1, "z", 2) + pauli_on(2, "z", 2)))
    assert not np.any(collective_coupling("x", BathConfig(gz=g), Ancilla(), 1))


def test_linear_in_couplings():
    a = collective_coupling("x", BathConfig(gx=(0.1, 0.2)), Conventional(), 2)
    b = collective_coupling("x", BathConfig(gx=(0.3, -0.5)), Conventional(), 2)
    ab = collective_coupling("x", BathConfig(gx=(0.4, -0.3)), Conventional(), 2)
    assert np.allclose(a + b, ab, atol=1e-15)


def test_stack_skips_zero_axes():
    axes, stack = coupling_stack(BathConfig(gx=0.1), Conventional(), 2)
    assert axes == ("x",) and stack.shape == (1, 4, 4)
    axes, stack = coupling_stack(BathConfig(), Ancilla(), 2)
    assert axes == () and stack.shape == (0, 16, 16)


def test_uniform_coupling_cancels_in_all_ones_sector():
    cz = collective_coupling("z", BathConfig(gz=0.1), Ancilla(), 1)
    frame = to_sector_frame(cz, 1)
    assert np.array_equal(frame[2:, 2:], np.zeros((2, 2)))
    assert np.allclose(frame[:2, :2], 0.2 * pauli_on(1, "z", 1))


@pytest.mark.parametrize("n", [1, 2])
def test_cancellation_report(n):
    assert check_cancellation(BathConfig(gz=0.1), n).residual < 1e-12
    assert check_cancellation(BathConfig(gz=0.1), n).block_norm < 1e-12
    zero = check_cancellation(BathConfig(), n)
    assert zero.residual == 0.0 and zero.block_norm == 0.0


def test_asymmetric_effective_coupling():
    bath = BathConfig(gz=(0.1, 0.12, 0.1, 0.12))
    rep = check_cancellation(bath, 2)
    assert rep.residual < 1e-12
    assert rep.effective_couplings == pytest.approx((0.02, 0.02), abs=1e-15)
    assert np.allclose(reduced_longitudinal(bath, 2), [0.02, 0.02])
