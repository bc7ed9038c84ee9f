import json

import numpy as np
import pytest

REPORT = {
    "rho": -4.48, "gamma": 4.03, "K0": 1.0, "K1": 1.0, "tau": 0.1,
    "c_norm": 5.0, "h_norm": 0.39, "b_norm": 0.42, "L_f": 1.0, "L_g": 1.0,
    "L_gtilde_numeric": 1.0, "L_gtilde_difference": 0.0, "L_gtilde_used": 1.0,
    "use_difference_lgtilde": False, "L_v": 1.18, "L_v_seed": 1,
    "L_v_horizon": [-20.0, 20.0], "L_v_dt": 0.001, "c0": 1.5, "c1": 0.97,
    "lemma6_ok": True, "lemma6_margins": [-1.27, 2.76],
    "theorem6_value": -1.49, "theorem6_ok": True,
    "T_B": 0.137, "lambda_abs": 0.999,
}


def write_csv(path, t, states):
    n = states.shape[1]
    lines = ["t," + ",".join(f"u_{j + 1}" for j in range(n))]
    for i in range(t.size):
        lines.append(",".join(repr(float(v)) for v in [t[i], *states[i]]))
    path.write_text("\n".join(lines) + "\n")


def make_bundle(root, decay=0.5):
    """Synthetic two-trajectory bundle with the simulator's file layout."""
    t = np.linspace(-0.1, 1.0, 56)
    for fname, scale in (("trajectory_small.csv", 0.1),
                         ("trajectory_large.csv", 10.0)):
        states = scale * np.exp(-decay * np.maximum(t, 0.0))[:, None] * np.ones(2)
        write_csv(root / fname, t, states)
    (root / "conditions.json").write_text(json.dumps(REPORT, indent=2))
    manifest = {
        "kind": "sdhopfield-bundle",
        "files": ["trajectory_small.csv", "trajectory_large.csv",
                  "conditions.json"],
        "trajectories": [
            {"file": "trajectory_small.csv", "seed": 1,
             "initial": [0.1, 0.2], "label": "small initial data"},
            {"file": "trajectory_large.csv", "seed": 2,
             "initial": [10.0, 20.0], "label": "large initial data"},
        ],
        "conditions": "conditions.json",
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


@pytest.fixture
def bundle(tmp_path):
    return make_bundle(tmp_path)
