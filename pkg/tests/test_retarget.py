from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from puwbench.sim.retarget import retarget_difficulty


def stamps(w, gap):
    return [i * gap for i in range(w + 1)]


def test_on_target_unchanged():
    assert retarget_difficulty(stamps(64, 600), 8, 600).value == 8


def test_twice_as_fast_doubles():
    assert retarget_difficulty(stamps(64, 300), 8, 600).value == 16


def test_clamped_both_ways():
    assert retarget_difficulty(stamps(64, 6), 8, 600).value == 32
    assert retarget_difficulty(stamps(64, 60000), 8, 600).value == 2
    assert retarget_difficulty([5.0, 5.0], 8, 600).value == 32


def test_exact_arithmetic_kept_for_fractions():
    out = retarget_difficulty([0, 1200], Fraction(3), 600)
    assert out.value == Fraction(3, 2)


@given(st.floats(1, 1e6), st.floats(1e-3, 1e3))
def test_factor_in_clamp_range(span, current):
    new = retarget_difficulty([0.0, span], current, 600).value
    assert current / 4 * (1 - 1e-12) <= new <= current * 4 * (1 + 1e-12)


def test_needs_two_stamps():
    with pytest.raises(ValueError):
        retarget_difficulty([1.0], 1, 600)
