import numpy as np
import pytest

from sdhopfield import ActivationSpec, HistorySegment, NetworkParams
from sdhopfield.cli import reference_params


@pytest.fixture
def reference():
    """The built-in two-unit network all the worked checks run against."""
    return reference_params()


def scalar_network(b, c=5.0, tau=0.1, sigma=0.0):
    return NetworkParams(n=1, C=[[c]], H=[[0.0]], B=[[b]], Sigma=[[sigma]],
                         delays=[tau], activation=ActivationSpec.tanh(1))


def two_unit(C, H, B, Sigma, tau=0.1):
    return NetworkParams(n=2, C=C, H=H, B=B, Sigma=Sigma, delays=[tau, tau],
                         activation=ActivationSpec.tanh(2))


def const_seg(head, tau=0.1, dt=1e-3):
    return HistorySegment.constant(np.asarray(head, dtype=float), tau, dt)
