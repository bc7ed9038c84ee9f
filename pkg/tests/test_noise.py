import io

import numpy as np
import pytest

from sdhopfield import coarsen, path_value, sample_path, shift, wong_zakai, write_path_csv
from sdhopfield.errors import ConfigError, DomainError, PathHorizonError

DELTA = 1e-2


def test_same_seed_is_bit_identical():
    a = sample_path(3, DELTA, t_min=-2.0, t_max=2.0, seed=42)
    b = sample_path(3, DELTA, t_min=-2.0, t_max=2.0, seed=42)
    assert np.array_equal(a.increments, b.increments)
    assert np.array_equal(a.cumsum, b.cumsum)


def test_origin_is_exact_zero():
    p = sample_path(2, DELTA, t_min=-1.0, t_max=1.0, seed=0)
    assert path_value(p, 0, 0.0) == 0.0
    assert path_value(p, 1, 0.0) == 0.0


def test_extending_the_window_preserves_the_realization():
    # growing t_max appends increments; growing -t_min prepends them; the
    # overlap is bit-identical because each component draws from ordered
    # forward/backward substreams
    small = sample_path(2, DELTA, t_min=-1.0, t_max=1.0, seed=9)
    wider = sample_path(2, DELTA, t_min=-3.0, t_max=4.0, seed=9)
    lo = wider.node_index(-1.0)
    hi = wider.node_index(1.0)
    assert np.array_equal(wider.increments[:, lo:hi], small.increments)
    for t in (-1.0, -0.37, 0.5, 1.0):
        assert path_value(wider, 0, t) == path_value(small, 0, t)


def test_path_value_interpolates_and_guards():
    p = sample_path(1, DELTA, t_min=0.0, t_max=1.0, seed=3)
    mid = 0.5 * (path_value(p, 0, 0.1) + path_value(p, 0, 0.11))
    assert path_value(p, 0, 0.105) == pytest.approx(mid, abs=1e-15)
    with pytest.raises(DomainError):
        path_value(p, 0, 1.5)


def test_increment_block_horizon_error_names_bounds():
    p = sample_path(1, DELTA, t_min=0.0, t_max=1.0, seed=3)
    with pytest.raises(PathHorizonError):
        p.increment_block(0.5, 200)
    err = None
    try:
        p.increment_block(-0.5, 10)
    except PathHorizonError as e:
        err = e
    assert err is not None and "-0.5" in str(err)


def test_shift_recenter_matches_definition():
    p = sample_path(2, DELTA, t_min=-2.0, t_max=3.0, seed=5)
    s = shift(p, 1.0)
    for t in (-1.0, 0.0, 0.25, 1.5):
        expect = path_value(p, 0, t + 1.0) - path_value(p, 0, 1.0)
        assert path_value(s, 0, t) == expect
    assert s.t_min == -3.0 and s.t_max == 2.0


def test_shift_composes_exactly():
    p = sample_path(1, DELTA, t_min=-4.0, t_max=4.0, seed=8)
    ab = shift(shift(p, 1.0), 0.5)
    direct = shift(p, 1.5)
    assert ab.origin_offset == direct.origin_offset
    assert np.array_equal(ab.increments, direct.increments)
    with pytest.raises(ConfigError):
        shift(p, 0.005)  # off the node grid


def test_coarsen_sums_increments_pairwise():
    p = sample_path(2, 1e-3, t_min=-1.0, t_max=1.0, seed=12)
    c = coarsen(p, 2)
    assert c.delta == pytest.approx(2e-3)
    assert np.array_equal(c.increments,
                          p.increments.reshape(2, -1, 2).sum(axis=2))
    # nodes that survive keep their exact values
    for t in (-1.0, -0.5, 0.0, 0.998, 1.0):
        assert path_value(c, 1, t) == path_value(p, 1, t)
    # node values compose exactly; increment arrays only to rounding
    # (summing four cells pair-by-pair groups the additions differently)
    cc, c4 = coarsen(c, 2), coarsen(p, 4)
    assert np.array_equal(cc.cumsum, c4.cumsum)
    assert np.max(np.abs(cc.increments - c4.increments)) < 1e-15
    with pytest.raises(ConfigError):
        coarsen(p, 3)  # 2000 cells, origin at 1000: 3 divides neither


def test_increment_moments_and_independence():
    # one long component: 1e5 increments, standardized
    p = sample_path(1, DELTA, t_min=0.0, t_max=1000.0, seed=7)
    z = p.increments[0] / np.sqrt(DELTA)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1.0) < 0.02
    lag1 = np.corrcoef(z[:-1], z[1:])[0, 1]
    assert abs(lag1) < 0.01


def test_unit_time_variance_across_components():
    # 1e5 independent components, one unit step each
    p = sample_path(100_000, 1.0, t_min=0.0, t_max=1.0, seed=7)
    w1 = p.node_values(p.origin_offset, p.origin_offset + 1)[1]
    assert 0.98 < np.mean(w1 ** 2) < 1.02
    # exp(W - 1/2) has unit mean; exercises the same values the diagonal
    # closed-form flow is built from
    assert 0.97 < np.mean(np.exp(w1 - 0.5)) < 1.03


def test_wong_zakai_nodes_and_slopes():
    p = sample_path(2, 1e-3, t_min=0.0, t_max=1.0, seed=4)
    wz = wong_zakai(p, 10)
    # interpolant equals the path at mesh nodes, bit for bit
    for t in (0.0, 0.1, 0.5, 1.0):
        assert wz.value(0, t) == path_value(p, 0, t)
    # midpoint of a cell is the average of its endpoints
    mid = wz.value(1, 0.25)
    assert mid == pytest.approx(0.5 * (path_value(p, 1, 0.2) + path_value(p, 1, 0.3)),
                                abs=1e-14)
    # cellwise slope equals k * (node difference)
    expect = 10.0 * (path_value(p, 0, 0.3) - path_value(p, 0, 0.2))
    assert wz.slope(2)[0] == pytest.approx(expect, abs=1e-12)
    assert wz.derivative(0, 0.25) == wz.slope(2)[0]
    with pytest.raises(DomainError):
        wz.value(0, 1.2)


def test_wong_zakai_mesh_must_sit_on_the_grid():
    p = sample_path(1, 1e-3, t_min=0.0, t_max=1.0, seed=4)
    with pytest.raises(ConfigError):
        wong_zakai(p, 3)  # 1/3 is not a multiple of 1e-3


def test_path_csv_round_trip():
    p = sample_path(2, 0.25, t_min=-0.5, t_max=0.5, seed=2)
    buf = io.StringIO()
    write_path_csv(p, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "t,W_1,W_2"
    assert len(lines) == 1 + p.n_cells + 1
    row = lines[1].split(",")
    assert float(row[0]) == -0.5
    assert float(row[1]) == path_value(p, 0, -0.5)
