import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siwave.core import Grid1D
from siwave.initcond import BumpSpec, InitialData, bump_eval, sample_initial

# exp(1/R^2 - 1/(R^2 - |x-C|^2)) at C=0.5, R=0.5, x=0.75, i.e. exp(-4/3),
# evaluated independently with a 40-digit Taylor series.
BUMP_AT_075 = 0.2635971381157268


def bumps(**overrides):
    base = dict(amplitude=1.0, center=0.5, radius=0.5)
    base.update(overrides)
    return BumpSpec(**base)


class TestBumpEval:
    def test_center_value_is_amplitude(self):
        assert bump_eval(bumps(), 0.5) == 1.0

    def test_scaled_center_value(self):
        assert bump_eval(bumps(amplitude=0.05), 0.5) == 0.05

    def test_outside_support_is_exact_zero(self):
        spec = bumps(center=0.4, radius=0.2)
        assert bump_eval(spec, 0.7) == 0.0
        assert bump_eval(spec, 0.6) == 0.0  # |x-C| == R exactly

    def test_frozen_point_value(self):
        value = bump_eval(bumps(), 0.75)
        assert value == pytest.approx(BUMP_AT_075, rel=1e-14)

    def test_array_input(self):
        x = np.array([0.5, 0.75, 1.5])
        values = bump_eval(bumps(), x)
        assert values[0] == 1.0
        assert values[1] == pytest.approx(BUMP_AT_075, rel=1e-14)
        assert values[2] == 0.0

    def test_no_warnings_near_support_edge(self):
        spec = bumps(center=0.5, radius=0.25)
        x = np.nextafter(0.75, 0.5)  # just inside the support
        with np.errstate(all="raise"):
            assert bump_eval(spec, x) >= 0.0

    @given(
        center=st.floats(min_value=0.05, max_value=0.95),
        radius=st.floats(min_value=0.01, max_value=0.9),
        x=st.floats(min_value=-2.0, max_value=3.0),
    )
    @settings(max_examples=300)
    def test_compact_support(self, center, radius, x):
        spec = bumps(center=center, radius=radius)
        value = bump_eval(spec, x)
        if abs(x - center) >= radius:
            assert value == 0.0
        else:
            assert value >= 0.0

    @given(
        center=st.floats(min_value=0.05, max_value=0.95),
        radius=st.floats(min_value=0.01, max_value=0.9),
        x=st.floats(min_value=-2.0, max_value=3.0),
    )
    @settings(max_examples=300)
    def test_bounded_by_amplitude(self, center, radius, x):
        spec = bumps(center=center, radius=radius, amplitude=0.7)
        value = bump_eval(spec, x)
        assert 0.0 <= value <= 0.7
        if abs(x - center) >= 1e-6:
            assert value < 0.7

    @given(k=st.integers(min_value=-2048, max_value=2048))
    def test_symmetry_about_center(self, k):
        # center 0.5 and dyadic offsets keep both evaluation points exact
        spec = bumps(center=0.5, radius=0.4)
        d = k / 4096.0
        assert bump_eval(spec, 0.5 + d) == bump_eval(spec, 0.5 - d)

    def test_tiny_radius_underflow_clamped(self):
        spec = bumps(center=0.5, radius=1e-160)
        with np.errstate(all="raise"):
            assert bump_eval(spec, 0.5) == 1.0
            assert bump_eval(spec, np.nextafter(0.5, 1.0)) == 0.0


class TestBumpSpecValidation:
    def test_center_outside_domain_rejected(self):
        with pytest.raises(ValueError):
            BumpSpec(1.0, 0.0, 0.2)
        with pytest.raises(ValueError):
            BumpSpec(1.0, 1.2, 0.2)

    def test_radius_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            BumpSpec(1.0, 0.5, 0.0)
        with pytest.raises(ValueError):
            BumpSpec(1.0, 0.5, 1.0)

    def test_touches_boundary_is_strict(self):
        # support closure exactly on the endpoint still vanishes there
        assert not BumpSpec(0.05, 0.5, 0.5).touches_boundary()
        assert not BumpSpec(0.05, 0.2, 0.2).touches_boundary()
        assert BumpSpec(0.05, 0.4, 0.5).touches_boundary()
        assert BumpSpec(0.05, 0.7, 0.4).touches_boundary()


class TestSampleInitial:
    def test_empty_is_zero(self):
        grid = Grid1D(20)
        assert np.array_equal(sample_initial(InitialData(()), grid), np.zeros(19))

    def test_single_bump_peak_at_center(self):
        grid = Grid1D(500)
        data = InitialData((BumpSpec(0.05, 0.5, 0.5),))
        values = sample_initial(data, grid)
        assert values.max() == 0.05
        # interior index 249 is node x_250 = 0.5
        assert int(np.argmax(values)) == 249

    def test_superposition_is_sum_of_samples(self):
        grid = Grid1D(100)
        b1 = BumpSpec(0.05, 0.4, 0.2)
        b2 = BumpSpec(0.05, 0.2, 0.2)
        combined = sample_initial(InitialData((b1, b2)), grid)
        separate = sample_initial(InitialData((b1,)), grid) + sample_initial(
            InitialData((b2,)), grid
        )
        assert np.array_equal(combined, separate)

    def test_zero_amplitude(self):
        grid = Grid1D(50)
        values = sample_initial(InitialData((BumpSpec(0.0, 0.5, 0.3),)), grid)
        assert np.array_equal(values, np.zeros(49))

    def test_boundary_nodes_excluded(self):
        grid = Grid1D(10)
        values = sample_initial(InitialData((BumpSpec(1.0, 0.5, 0.5),)), grid)
        assert values.shape == (9,)
