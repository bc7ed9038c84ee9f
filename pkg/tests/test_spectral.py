import numpy as np
import pytest

import oracles
from conftest import scalar_network, two_unit
from sdhopfield import (analyze_spectrum, char_det, characteristic_matrix,
                        decay_constants, default_search_box, dominant_roots,
                        fundamental_solution)
from sdhopfield.errors import (ConfigError, EmptySpectrumError,
                               UnstableLinearizationError)

# fixed-point oracle outputs for c=5, tau=0.1 (recomputed in the tests too)
ROOT_FEEDBACK_NEG = -5.52107279526053
ROOT_FEEDBACK_POS = -4.5281786853777595
REFERENCE_ABSCISSA = -4.4808450826389405


@pytest.mark.parametrize("b,frozen", [(-0.3, ROOT_FEEDBACK_NEG),
                                      (0.3, ROOT_FEEDBACK_POS)])
def test_scalar_root_against_bisection_oracle(b, frozen):
    oracle = oracles.scalar_dominant_root(5.0, b, 0.1)
    assert oracle == pytest.approx(frozen, abs=1e-12)
    result = dominant_roots(scalar_network(b))
    assert result.abscissa == pytest.approx(oracle, abs=1e-8)
    # within the default box only the real root survives
    assert len(result.roots) == 1
    assert result.roots[0].imag == 0.0
    assert result.residuals[0] < 1e-9


def test_characteristic_matrix_shape_and_value():
    params = scalar_network(0.3)
    m = characteristic_matrix(params, 0.0)
    # lam=0: 0 + c - b*L*1
    assert m[0, 0] == pytest.approx(5.0 - 0.3)


def test_determinant_derivative_matches_central_difference(reference):
    rng = np.random.default_rng(0)
    lam = rng.uniform(-10.0, 1.0, 100) + 1j * rng.uniform(0.0, 50.0, 100)
    det, ddet = char_det(reference, lam, with_derivative=True)
    h = 1e-6
    numeric = (char_det(reference, lam + h) - char_det(reference, lam - h)) / (2 * h)
    rel = np.abs(ddet - numeric) / np.maximum(1e-12, np.abs(numeric))
    assert np.max(rel) < 1e-4


def test_reference_roots_match_dense_scan(reference):
    result = dominant_roots(reference)
    assert result.abscissa == pytest.approx(REFERENCE_ABSCISSA, abs=1e-9)
    assert result.abscissa < 0.0
    box = default_search_box(reference)
    BL = reference.B @ reference.activation.linear_part
    scan = oracles.scan_roots(np.diagonal(reference.C), BL, reference.delays, box)
    pkg = [complex(z) for z in result.roots if z.imag >= 0.0]
    assert len(scan) == len(pkg)
    for z in scan:
        assert min(abs(z - q) for q in pkg) < 1e-6
    assert np.all(result.residuals < 1e-9)


def test_complex_roots_come_in_conjugate_pairs():
    params = two_unit(np.eye(2), np.zeros((2, 2)),
                      np.array([[0.0, -2.0], [2.0, 0.0]]),
                      np.zeros((2, 2)), tau=0.5)
    result = dominant_roots(params)
    complex_roots = [z for z in result.roots if z.imag != 0.0]
    assert complex_roots, "this rotation-coupled pair must oscillate"
    for z in complex_roots:
        assert any(abs(np.conj(z) - w) < 1e-9 for w in result.roots)
    # descending real part, conjugates adjacent
    assert list(result.roots) == sorted(result.roots,
                                        key=lambda z: (-z.real, z.imag))
    # the same inventory falls out of the dense scan
    BL = params.B @ params.activation.linear_part
    scan = oracles.scan_roots(np.diagonal(params.C), BL, params.delays,
                              default_search_box(params))
    pkg = [complex(z) for z in result.roots if z.imag >= 0.0]
    assert len(scan) == len(pkg)
    for z in scan:
        assert min(abs(z - q) for q in pkg) < 1e-6


def test_empty_box_raises(reference):
    with pytest.raises(EmptySpectrumError):
        dominant_roots(reference, box=(-0.5, 1.0, 5.0))


def test_fundamental_solution_layout(reference):
    S = fundamental_solution(reference, 1e-3, 2.0)
    assert S.matrices.shape == (2001, 2, 2)
    assert np.array_equal(S.matrices[0], np.eye(2))
    assert S.norms[0] == 1.0
    # strictly contracting network: the norm must decay over the horizon
    assert S.norms[-1] < 1e-3


def test_fundamental_solution_tail_decays_at_the_abscissa_rate(reference):
    result = dominant_roots(reference)
    S = fundamental_solution(reference, 1e-3, 5.0)
    t = S.times
    mask = (t >= 2.0) & (t <= 4.5)
    slope = np.polyfit(t[mask], np.log(S.norms[mask]), 1)[0]
    assert abs(slope - result.abscissa) < 0.1 * abs(result.abscissa)


def test_decay_constants_for_plain_decay():
    # B = 0: S(t) = e^{-5t} I, so both prefactors collapse to 1
    params = two_unit(np.diag([5.0, 5.0]), np.zeros((2, 2)), np.zeros((2, 2)),
                      np.zeros((2, 2)))
    result = dominant_roots(params)
    assert result.abscissa == pytest.approx(-5.0, abs=1e-10)
    S = fundamental_solution(params, 1e-3, 3.0)
    gamma, K0, K1 = decay_constants(params, result.abscissa, S)
    assert gamma == pytest.approx(0.9 * 5.0)
    assert K0 == 1.0
    assert K1 == 1.0


def test_decay_constants_need_a_long_enough_horizon(reference):
    result = dominant_roots(reference)
    S = fundamental_solution(reference, 1e-3, 0.5)
    with pytest.raises(ConfigError):
        decay_constants(reference, result.abscissa, S)


def test_unstable_linearization_is_refused():
    params = scalar_network(2.0, c=1.0, tau=1.0)
    root = oracles.scalar_dominant_root(1.0, 2.0, 1.0)
    assert root > 0.0
    with pytest.raises(UnstableLinearizationError):
        analyze_spectrum(params, 1e-3)


def test_analyze_spectrum_pipeline(reference):
    result = analyze_spectrum(reference, 1e-3)
    assert result.gamma == pytest.approx(0.9 * (-result.abscissa))
    assert result.K0 >= 1.0
    assert result.K1 > 0.0
    assert result.abscissa == pytest.approx(REFERENCE_ABSCISSA, abs=1e-9)
