import numpy as np
import pytest

from periflow.geometry import ChannelGeometry, GeometryError


def test_straight_walls():
    g = ChannelGeometry.straight()
    x = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(g.wall_bottom(x), -1.0)
    np.testing.assert_array_equal(g.wall_top(x), 1.0)
    assert g.is_straight
    g.validate()


def test_cosine_sections_exact_at_ends():
    g = ChannelGeometry.cosine(0.2, periods=3)
    # exact equality required: the end sections must be {0,1} x (-1, 1)
    assert g.wall_bottom(0.0) == -1.0
    assert g.wall_bottom(1.0) == -1.0
    assert g.wall_top(0.0) == 1.0
    assert g.wall_top(1.0) == 1.0
    assert not g.is_straight
    g.validate()


def test_cosine_amplitude_meaning():
    g = ChannelGeometry.cosine(0.2, 1)
    # maximum wall displacement is 2 * amplitude, at the throat
    assert g.wall_bottom(0.5) == pytest.approx(-1.0 + 0.4, rel=1e-14)
    assert g.wall_top(0.5) == pytest.approx(1.0 - 0.4, rel=1e-14)
    assert g.width(0.5) == pytest.approx(1.2, rel=1e-14)


def test_near_degenerate_amplitude_is_valid():
    ChannelGeometry.cosine(0.45, 1).validate()


def test_degenerate_amplitude_rejected_with_location():
    with pytest.raises(GeometryError, match="x=0.5"):
        ChannelGeometry.cosine(0.5, 1).validate()
    with pytest.raises(GeometryError):
        ChannelGeometry.cosine(0.6, 1).validate()


def test_cosine_invalid_periods():
    with pytest.raises(GeometryError):
        ChannelGeometry.cosine(0.1, periods=0)


def test_tabulated_roundtrip():
    x = np.linspace(0, 1, 11)
    bump = 0.1 * np.sin(np.pi * x) ** 2
    g = ChannelGeometry.tabulated(x, -1 + bump, 1 - bump)
    assert g.wall_bottom(0.0) == -1.0
    assert g.wall_top(1.0) == 1.0
    assert g.width(0.5) == pytest.approx(2 - 0.2, rel=1e-12)


def test_tabulated_rejects_bad_samples():
    x = np.array([0.0, 0.5, 1.0])
    with pytest.raises(GeometryError):
        ChannelGeometry.tabulated(x, [-1, -0.9, -0.95], [1, 0.9, 1.0001])  # bad end
    with pytest.raises(GeometryError):
        ChannelGeometry.tabulated([0.0, 0.6, 0.5, 1.0], [-1, -1, -1, -1], [1, 1, 1, 1])
    with pytest.raises(GeometryError):
        ChannelGeometry.tabulated(x, [-1, 0.95, -1], [1, 0.9, 1])  # crossing walls


def test_zero_amplitude_cosine_counts_as_straight():
    assert ChannelGeometry.cosine(0.0, 1).is_straight
