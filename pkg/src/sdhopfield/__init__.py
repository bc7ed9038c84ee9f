"""Path-wise simulation and stability analysis for stochastic delayed
Hopfield networks with multiplicative noise.

Modules:

* :mod:`~sdhopfield.model`       network parameters, activations, history segments
* :mod:`~sdhopfield.noise`       two-sided Brownian paths, shifts, interpolants
* :mod:`~sdhopfield.linearflow`  fundamental flow of the pure-noise equation
* :mod:`~sdhopfield.integrator`  direct, conjugated, and interpolant routes
* :mod:`~sdhopfield.spectral`    characteristic roots and decay constants
* :mod:`~sdhopfield.conditions`  stability constants and criteria report
* :mod:`~sdhopfield.attractor`   pullback attraction experiments
* :mod:`~sdhopfield.cli`         command line entry points
"""

from .errors import (AnalysisError, ConfigError, DivergenceError, DomainError,
                     EmptySpectrumError, FlowDegenerateError, PathHorizonError,
                     SimulationError, UnstableLinearizationError)
from .model import (ActivationSpec, HistorySegment, NetworkParams,
                    evaluate_activation, segment_distance, segment_eval,
                    segment_norm, validate_params)
from .noise import (BrownianPath, WongZakaiView, coarsen, path_value,
                    sample_path, shift, wong_zakai, write_path_csv)
from .linearflow import LinearFlow, build_flow, estimate_bound, flow_apply
from .integrator import (Trajectory, end_segment, integrate_conjugated,
                         integrate_direct, integrate_wong_zakai)
from .spectral import (FundamentalSolution, SpectralResult, analyze_spectrum,
                       char_det, characteristic_matrix, decay_constants,
                       default_search_box, dominant_roots, fundamental_solution)
from .conditions import (ConditionReport, absorbing_radius, check_lemma6,
                         check_theorem6, compute_constants, full_report,
                         report_to_dict, report_to_json)
from .attractor import (PullbackRun, RateFit, StationaryEstimate,
                        attraction_rate, cocycle_residual, pullback_endpoints,
                        stationary_point, wong_zakai_gap)

__version__ = "0.1.0"
