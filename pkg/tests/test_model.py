import numpy as np
import pytest

from sdhopfield import (ActivationSpec, HistorySegment, NetworkParams,
                        evaluate_activation, segment_distance, segment_eval,
                        segment_norm, validate_params)
from sdhopfield.errors import ConfigError, DomainError
from sdhopfield.model import require_valid

from conftest import scalar_network

TANH_HALF = 0.46211715726000974


def test_tanh_spec_constants():
    spec = ActivationSpec.tanh(3)
    assert spec.kind == "tanh"
    assert spec.lipschitz_f == 1.0
    assert spec.lipschitz_g == 1.0
    assert spec.bound == 1.0
    assert np.array_equal(spec.linear_part, np.eye(3))


def test_tanh_evaluation_matches_numpy():
    spec = ActivationSpec.tanh(2)
    x = np.array([-2.0, 0.5])
    assert np.array_equal(evaluate_activation(spec, x, "f"), np.tanh(x))
    assert np.array_equal(evaluate_activation(spec, x, "g"), np.tanh(x))
    assert evaluate_activation(spec, np.array([0.5, 0.0]), "f")[0] == TANH_HALF


def test_tanh_centered_slope_gap():
    # sup over the sample window of |tanh'(x) - 1| = tanh(edge)^2
    spec = ActivationSpec.tanh(1)
    lo, hi = spec.sample_range
    assert np.isclose(spec.lipschitz_g_tilde, np.tanh(hi) ** 2, rtol=1e-6)
    # difference form: L_g - ||linear_part||_2 = 1 - 1
    assert spec.lipschitz_g_tilde_difference == 0.0


def test_table_activation_interpolates():
    xs = np.array([-2.0, 0.0, 2.0])
    vals = np.array([-1.0, 0.0, 1.0])
    spec = ActivationSpec.from_table(1, xs, vals, vals, lipschitz_f=0.5,
                                     lipschitz_g=0.5, bound=1.0)
    assert evaluate_activation(spec, np.array([1.0]), "f")[0] == 0.5
    assert evaluate_activation(spec, np.array([-0.5]), "g")[0] == -0.25
    with pytest.raises(DomainError):
        evaluate_activation(spec, np.array([2.5]), "f")


def test_table_activation_validation():
    xs = np.array([-1.0, 0.0, 1.0])
    vals = np.array([-1.0, 0.0, 1.0])
    with pytest.raises(ConfigError):
        ActivationSpec.from_table(1, xs[::-1].copy(), vals, vals,
                                  lipschitz_f=1.0, lipschitz_g=1.0, bound=1.0)
    with pytest.raises(ConfigError):
        ActivationSpec.from_table(1, xs, vals + 0.5, vals,
                                  lipschitz_f=1.0, lipschitz_g=1.0, bound=1.0)
    with pytest.raises(ConfigError):
        ActivationSpec.from_table(1, xs + 5.0, vals, vals,
                                  lipschitz_f=1.0, lipschitz_g=1.0, bound=1.0)


def test_params_arrays_are_read_only(reference):
    for mat in (reference.C, reference.H, reference.B, reference.Sigma,
                reference.delays):
        assert not mat.flags.writeable
    with pytest.raises(ValueError):
        reference.C[0, 0] = 7.0
    assert reference.max_delay == 0.1


def test_validate_params_reports_each_issue():
    p = scalar_network(0.3)
    assert validate_params(p) == []
    assert validate_params(p, dt=1e-3) == []

    bad_c = NetworkParams(n=2, C=[[5.0, 1.0], [0.0, 5.0]], H=np.zeros((2, 2)),
                          B=np.zeros((2, 2)), Sigma=np.zeros((2, 2)),
                          delays=[0.1, 0.1], activation=ActivationSpec.tanh(2))
    assert any("diagonal" in msg for msg in validate_params(bad_c))

    bad_tau = scalar_network(0.0)
    bad_tau = NetworkParams(n=1, C=[[5.0]], H=[[0.0]], B=[[0.0]],
                            Sigma=[[0.0]], delays=[-0.1],
                            activation=ActivationSpec.tanh(1))
    assert any("delay" in msg for msg in validate_params(bad_tau))

    # 0.1 is not an integer multiple of dt = 3e-3
    misaligned = validate_params(scalar_network(0.3), dt=3e-3)
    assert any("dt" in msg for msg in misaligned)
    with pytest.raises(ConfigError):
        require_valid(scalar_network(0.3), dt=3e-3)


def test_constant_segment_shape_and_eval():
    seg = HistorySegment.constant(np.array([0.1, 0.2]), 0.1, 1e-3)
    assert seg.values.shape == (101, 2)
    assert seg.tau == pytest.approx(0.1)
    assert seg.n == 2
    assert np.array_equal(segment_eval(seg, 0.0), [0.1, 0.2])
    assert np.array_equal(segment_eval(seg, -0.1), [0.1, 0.2])
    with pytest.raises(DomainError):
        segment_eval(seg, -0.2)
    with pytest.raises(DomainError):
        segment_eval(seg, 1e-3)


def test_segment_eval_is_linear_between_nodes():
    # a ramp in s must be reproduced exactly by the interpolant
    step = 0.05
    nodes = np.linspace(-0.1, 0.0, 3)[:, None] * np.array([[1.0, 2.0]])
    seg = HistorySegment(step=step, values=nodes)
    got = segment_eval(seg, -0.075)
    assert np.allclose(got, [-0.075, -0.15], atol=1e-15)
    # node hits return the stored row bit for bit
    assert np.array_equal(segment_eval(seg, -0.05), nodes[1])


def test_segment_norm_and_distance():
    a = HistorySegment.constant(np.array([3.0, 4.0]), 0.1, 1e-2)
    b = HistorySegment.constant(np.array([0.0, 0.0]), 0.1, 1e-2)
    assert segment_norm(a) == 5.0
    assert segment_distance(a, a) == 0.0
    assert segment_distance(a, b) == segment_distance(b, a) == 5.0
    mismatched = HistorySegment.constant(np.array([0.0, 0.0]), 0.1, 1e-3)
    with pytest.raises(ConfigError):
        segment_distance(a, mismatched)
