import math

import numpy as np
import pytest
from scipy.stats import qmc

from spectralgap import geometry as geo
from spectralgap.analytic import unit_ball_volume

# frozen from an independent scipy.integrate.quad run of the cap formula
DUMBBELL_MEASURE_01 = 6.165733493424383      # eps = 0.1, N = 2
T_FACTOR_005 = 0.709473275947743             # eps = 0.05, N = 2


def sobol_fraction(domain, lo, hi, n_log2=21, seed=20250808, **kwargs):
    """Quasi-random membership fraction; (estimate, bernoulli standard error)."""
    sampler = qmc.Sobol(d=2, scramble=True, seed=seed)
    pts = qmc.scale(sampler.random_base2(n_log2), lo, hi)
    inside = geo.contains(domain, pts, **kwargs)
    n = len(pts)
    p = inside.mean()
    area_box = float(np.prod(np.asarray(hi) - np.asarray(lo)))
    return p * area_box, math.sqrt(max(p * (1 - p), 1e-12) / n) * area_box


class TestContains:
    def test_dumbbell_right_center(self):
        assert geo.contains(geo.Dumbbell(0.1), np.array([0.9, 0.0]))

    def test_dumbbell_junction_plane_excluded(self):
        assert not geo.contains(geo.Dumbbell(0.1), np.array([0.0, 0.0]))

    def test_dumbbell_junction_flag(self):
        d = geo.Dumbbell(0.1)
        a = geo.junction_radius(0.1)
        assert geo.contains(d, np.array([0.0, 0.0]), include_junction=True)
        assert geo.contains(d, np.array([0.0, 0.9 * a]), include_junction=True)
        assert not geo.contains(d, np.array([0.0, 1.1 * a]), include_junction=True)

    def test_ball_interior_point(self):
        assert geo.contains(geo.Ball(), np.array([0.5, 0.5]))
        assert not geo.contains(geo.Ball(), np.array([1.0, 0.0]))  # boundary is out

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            geo.contains(geo.Ball(), np.array([0.1, 0.2, 0.3]))

    def test_batch_shape(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.3, -0.4]])
        inside = geo.contains(geo.Ball(), pts)
        assert inside.tolist() == [True, False, True]

    def test_halfdumbbell_is_right_part(self):
        h = geo.HalfDumbbell(0.1)
        assert geo.contains(h, np.array([0.9, 0.0]))
        assert not geo.contains(h, np.array([-0.9, 0.0]))

    def test_scaled_equivalence_sampled(self):
        rng = np.random.default_rng(11)
        inner = geo.Dumbbell(0.15)
        for _ in range(1000):
            t = float(rng.uniform(0.2, 3.0))
            x = rng.uniform(-3.0, 3.0, size=2)
            assert geo.contains(geo.Scaled(t, inner), x) == geo.contains(inner, x / t)


class TestMeasure:
    def test_ball(self):
        assert geo.measure(geo.Ball()) == pytest.approx(math.pi, rel=1e-14)
        assert geo.measure(geo.Ball(radius=2.0, dim=3)) == pytest.approx(
            8.0 * unit_ball_volume(3), rel=1e-14)

    def test_dumbbell_caps_vanish(self):
        assert geo.measure(geo.Dumbbell(1e-9)) == pytest.approx(2.0 * math.pi, rel=1e-10)

    def test_dumbbell_frozen_value(self):
        assert geo.measure(geo.Dumbbell(0.1)) == pytest.approx(DUMBBELL_MEASURE_01, rel=1e-9)

    def test_dumbbell_monte_carlo(self):
        d = geo.Dumbbell(0.1)
        lo, hi = geo.bounding_box(d)
        est, se = sobol_fraction(d, lo, hi)
        assert abs(est - geo.measure(d)) <= 3.0 * se

    def test_scaled_measure(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            t = float(rng.uniform(0.1, 5.0))
            m = geo.measure(geo.Scaled(t, geo.Dumbbell(0.2)))
            assert m == pytest.approx(t**2 * geo.measure(geo.Dumbbell(0.2)), rel=1e-9)

    def test_monotone_in_eps(self):
        grid = np.linspace(0.01, 0.3, 30)
        vals = [geo.measure(geo.Dumbbell(e)) for e in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_cap_expansion_rate_bounded(self):
        # (2 omega - measure)/eps^{3/2} stays inside a fixed positive window
        for eps in np.geomspace(1e-3, 0.1, 12):
            ratio = (2.0 * math.pi - geo.measure(geo.Dumbbell(eps))) / eps**1.5
            assert 3.6 <= ratio <= 3.9

    def test_union_and_rectangle(self):
        u = geo.DisjointUnion((geo.Ball(center=(-3.0, 0.0)), geo.Ball(center=(3.0, 0.0))))
        assert geo.measure(u) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert geo.measure(geo.Rectangle(2.0, 0.5)) == 1.0
        assert geo.measure(geo.Ellipse(2.0, 1.0)) == pytest.approx(2.0 * math.pi)


class TestRescale:
    def test_unit_ball_identity(self):
        _, t = geo.rescale_to_unit_measure(geo.Ball())
        assert t == pytest.approx(1.0, abs=1e-15)

    def test_two_balls(self):
        _, t = geo.rescale_to_unit_measure(geo.TwoBalls())
        assert t == pytest.approx(2.0 ** (-0.5), rel=1e-14)

    def test_dumbbell_frozen(self):
        scaled, t = geo.rescale_to_unit_measure(geo.Dumbbell(0.05))
        assert t == pytest.approx(T_FACTOR_005, rel=1e-9)
        assert geo.measure(scaled) == pytest.approx(math.pi, rel=1e-10)

    def test_3d(self):
        scaled, t = geo.rescale_to_unit_measure(geo.TwoBalls(dim=3))
        assert t == pytest.approx(2.0 ** (-1.0 / 3.0), rel=1e-14)
        assert geo.measure(scaled) == pytest.approx(unit_ball_volume(3), rel=1e-10)


class TestCone:
    def test_printed_formula(self):
        assert geo.cone_volume(0.1, 2) == pytest.approx(0.19, rel=1e-12)

    def test_vanishes(self):
        assert geo.cone_volume(1e-12, 2) < 1e-11

    def test_monte_carlo(self):
        cone = geo.ConeRegion(0.1, dim=2)
        a = cone.apex_offset
        sampler = qmc.Sobol(d=2, scramble=True, seed=1)
        lo, hi = np.array([0.0, -a]), np.array([a, a])
        pts = qmc.scale(sampler.random_base2(21), lo, hi)
        inside = cone.contains(pts)
        est = inside.mean() * float(np.prod(hi - lo))
        se = math.sqrt(inside.mean() * (1 - inside.mean()) / len(pts)) * float(np.prod(hi - lo))
        assert abs(est - geo.cone_volume(0.1, 2)) <= 3.0 * se

    def test_apex_offset(self):
        assert geo.ConeRegion(0.1).apex_offset == pytest.approx(math.sqrt(0.19))


class TestValidation:
    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7])
    def test_dumbbell_range(self, bad):
        with pytest.raises(ValueError):
            geo.Dumbbell(bad)

    def test_two_balls_overlap(self):
        with pytest.raises(ValueError):
            geo.TwoBalls(separation=1.9)

    def test_union_overlap(self):
        with pytest.raises(ValueError):
            geo.DisjointUnion((geo.Ball(), geo.Ball(center=(1.5, 0.0))))

    def test_scaled_factor(self):
        with pytest.raises(ValueError):
            geo.Scaled(0.0, geo.Ball())

    def test_rectangle_planar_only(self):
        with pytest.raises(ValueError):
            geo.Rectangle(1.0, 1.0, dim=3)


class TestSerialization:
    @pytest.mark.parametrize("domain", [
        geo.Ball(center=(0.5, -1.0), radius=2.0),
        geo.TwoBalls(separation=5.0),
        geo.Dumbbell(0.07),
        geo.HalfDumbbell(0.2, dim=3),
        geo.Scaled(0.5, geo.Dumbbell(0.1)),
        geo.DisjointUnion((geo.Ball(center=(-4.0, 0.0)), geo.Rectangle(1.0, 1.0))),
        geo.Ellipse(2.0, 1.0),
    ])
    def test_roundtrip(self, domain):
        assert geo.domain_from_dict(geo.domain_to_dict(domain)) == domain

    def test_malformed(self):
        with pytest.raises(ValueError):
            geo.domain_from_dict({"kind": "pentagon", "N": 2, "params": {}})
        with pytest.raises(ValueError):
            geo.domain_from_dict({"N": 2})
