import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirwalk.errors import DimensionMismatch, DomainError
from dirwalk.exactlaw import WalkConfig
from dirwalk.laws import BetaLaw
from dirwalk.sampler import (
    RngStream,
    SampleBatch,
    StickConfig,
    compose_semigroup,
    read_batch_csv,
    sample_dirichlet,
    sample_beta,
    sample_dirichlet_batch,
    sample_radial,
    sample_sphere,
    sample_spheres,
    sample_stick_breaking,
    sample_walk,
    write_batch_csv,
)
from dirwalk.verify import ks_critical, ks_radial, ks_statistic


def within(values, mean, k=5.0):
    se = values.std(ddof=1) / math.sqrt(len(values))
    return abs(values.mean() - mean) <= k * se


def test_rng_stream_reproducible_and_distinct():
    a = RngStream(7, (3,)).generator().random(5)
    b = RngStream(7, (3,)).generator().random(5)
    c = RngStream(7, (4,)).generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_rng_stream_validation():
    with pytest.raises(DomainError):
        RngStream(-1)
    with pytest.raises(DomainError):
        RngStream(2 ** 64)
    assert RngStream(1, 5).stream == (5,)
    assert RngStream(1).child(2).label() == "0.2"


@pytest.mark.parametrize("d", [1, 2, 3, 7])
def test_sphere_points_are_unit(d):
    pts = sample_spheres(d, 2000, RngStream(1))
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert sample_sphere(d, RngStream(2)).shape == (d,)


def test_sphere_d1_is_rademacher():
    pts = sample_spheres(1, 1000, RngStream(3))
    assert set(np.unique(pts)) == {-1.0, 1.0}


@pytest.mark.parametrize("d", [2, 3, 5])
def test_sphere_second_moment(d):
    pts = sample_spheres(d, 10 ** 5, RngStream(4))
    assert within(pts[:, 0] ** 2, 1 / d)


def test_dirichlet_simplex_and_single():
    x = sample_dirichlet_batch([0.3, 1.0, 2.5], 1000, RngStream(5))
    assert np.all(x >= 0)
    assert np.allclose(x.sum(axis=1), 1.0, atol=1e-14)
    assert np.array_equal(sample_dirichlet([2.0], RngStream(6)), np.array([1.0]))


def test_dirichlet_moments():
    x = sample_dirichlet_batch([2, 2], 10 ** 5, RngStream(7))[:, 0]
    assert within(x, 0.5)
    assert within(x ** 2, 0.3)


def test_dirichlet_tiny_shapes_do_not_underflow():
    x = sample_dirichlet_batch([1e-3] * 4, 5000, RngStream(8))
    assert np.all(np.isfinite(x))
    assert np.allclose(x.sum(axis=1), 1.0)
    assert within(x[:, 0], 0.25)


def test_dirichlet_exchangeable():
    a = sample_dirichlet_batch([0.5, 1.5, 3.0], 10 ** 5, RngStream(9))
    b = sample_dirichlet_batch([3.0, 0.5, 1.5], 10 ** 5, RngStream(10))
    for i, j in ((0, 1), (1, 2), (2, 0)):
        assert within(a[:, i] - b[:, j], 0.0)


def test_dirichlet_rejects_bad_parameters():
    with pytest.raises(DomainError):
        sample_dirichlet([1.0, 0.0], RngStream(0))


def test_walk_in_ball_and_mean():
    batch = sample_walk(WalkConfig(3, (2, 2)), 10 ** 5, RngStream(11))
    r2 = batch.squared_radii()
    assert np.all(r2 <= 1 + 1e-12)
    assert within(r2, 3 / 5)
    assert batch.meta["config"] == "d=3;q=2,2"
    assert batch.meta["count"] == 10 ** 5


def test_walk_uniform_case_ks():
    batch = sample_walk(WalkConfig(2, (1, 1, 1)), 10 ** 5, RngStream(12))
    assert ks_radial(batch, BetaLaw(1, 1)).passed


def test_walk_reproducible_and_worker_deterministic():
    cfg = WalkConfig(2, (1, 2))
    a = sample_walk(cfg, 1000, RngStream(13), workers=3)
    b = sample_walk(cfg, 1000, RngStream(13), workers=3)
    c = sample_walk(cfg, 1000, RngStream(13), workers=1)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert len(a) == 1000


def test_walk_count_validation():
    with pytest.raises(DomainError):
        sample_walk(WalkConfig(2, (1, 1)), 0, RngStream(0))
    with pytest.raises(DomainError):
        sample_walk(WalkConfig(2, (1, 1)), 10, RngStream(0), workers=0)


def test_rotation_invariance():
    batch = sample_walk(WalkConfig(3, (1, 2)), 10 ** 5, RngStream(14))
    theta = 0.7
    rot = np.array([[math.cos(theta), -math.sin(theta), 0], [math.sin(theta), math.cos(theta), 0], [0, 0, 1]])
    x = np.sort(batch.points[:, 0])
    y = np.sort((batch.points @ rot.T)[:, 0])
    # two-sample KS distance between e1 projections, three asymptotic quantiles
    grid = np.concatenate([x, y])
    dist = np.max(np.abs(np.searchsorted(x, grid, side="right") - np.searchsorted(y, grid, side="right"))) / len(x)
    assert dist < 3 * ks_critical(len(x)) * math.sqrt(2)


def test_stick_config_validation():
    with pytest.raises(DomainError):
        StickConfig(0.0, 2)
    with pytest.raises(DomainError):
        StickConfig(1.0, 2, epsilon=1.0)
    with pytest.raises(DomainError):
        StickConfig(1.0, 0)


def test_stick_breaking_d1_second_moment():
    batch = sample_stick_breaking(StickConfig(2.0, 1), 10 ** 5, RngStream(15))
    assert np.all(np.abs(batch.points) <= 1 + 1e-12)
    assert within(batch.points[:, 0] ** 2, 1 / 3)


def test_stick_breaking_d1_radial_law():
    batch = sample_stick_breaking(StickConfig(3.0, 1), 10 ** 5, RngStream(16))
    assert ks_radial(batch, BetaLaw(F(1, 2), F(3, 2))).passed


def test_stick_breaking_d2_radial_law():
    # exp(Q L_2) = G^Q has the moments of beta(1, Q)
    batch = sample_stick_breaking(StickConfig(1.0, 2), 10 ** 5, RngStream(17))
    assert ks_radial(batch, BetaLaw(1, 1)).passed


def test_semigroup_d2():
    a = sample_radial(BetaLaw(1, 1), 2, 10 ** 5, RngStream(18))
    b = sample_radial(BetaLaw(1, 2), 2, 10 ** 5, RngStream(19))
    out = compose_semigroup(a, b, 1, 2, RngStream(20))
    assert np.all(out.squared_radii() <= 1 + 1e-12)
    assert ks_radial(out, BetaLaw(1, 3)).passed


def test_semigroup_d1_symmetric_beta():
    # index q <-> (1+W)/2 ~ beta(q + 1/2, q + 1/2); indices add under D(q1, q2) mixing
    rng = RngStream(21)

    def member(q, stream):
        y = 2 * sample_beta(q + 0.5, q + 0.5, 10 ** 5, rng.child(stream)) - 1
        return SampleBatch(1, y)

    out = compose_semigroup(member(1.0, 0), member(0.5, 1), 1.0, 0.5, rng.child(2))
    u = (1 + out.points[:, 0]) / 2
    law = BetaLaw(F(2), F(2))
    assert ks_statistic(u, law.cdf) < ks_critical(len(u))


def test_semigroup_mismatch():
    a = SampleBatch(2, np.zeros((4, 2)))
    with pytest.raises(DimensionMismatch):
        compose_semigroup(a, SampleBatch(3, np.zeros((4, 3))), 1, 1, RngStream(0))
    with pytest.raises(DimensionMismatch):
        compose_semigroup(a, SampleBatch(2, np.zeros((5, 2))), 1, 1, RngStream(0))


def test_csv_round_trip(tmp_path):
    batch = sample_walk(WalkConfig(3, (F(1, 2), 2)), 200, RngStream(22, (4,)))
    path = tmp_path / "batch.csv"
    write_batch_csv(batch, path)
    back = read_batch_csv(path)
    assert back.d == 3
    assert np.array_equal(back.points, batch.points)
    assert back.meta["seed"] == 22 and back.meta["stream"] == "4"
    assert back.meta["config"] == "d=3;q=1/2,2"
    text = path.read_text().splitlines()
    assert text[:4] == ["# seed=22", "# stream=4", "# d=3", "# config=d=3;q=1/2,2"]


def test_csv_requires_dimension(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0.1,0.2\n")
    with pytest.raises(DomainError):
        read_batch_csv(path)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.lists(st.sampled_from([0.2, 0.5, 1.0, 2.0, 3.5]), min_size=1, max_size=5),
       st.integers(0, 2 ** 32))
def test_walk_points_always_in_ball(d, qs, seed):
    batch = sample_walk(WalkConfig(d, tuple(qs)), 200, RngStream(seed))
    assert np.all(np.linalg.norm(batch.points, axis=1) <= 1 + 1e-12)
