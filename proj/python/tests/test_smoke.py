import numpy as np
import pytest

import ppl_lab


def test_simulate_and_fit_constant():
    pts, window = ppl_lab.simulate({"type": "poisson", "intensity": 150}, seed=4)
    assert pts.shape[1] == 2
    assert window == (0.0, 1.0, 0.0, 1.0)
    rec = ppl_lab.fit(pts, task="constant", cv={"kind": "mccv", "p": 0.5, "k": 50})
    assert rec["baseline"]["classical"] == pytest.approx(len(pts))
    assert rec["counted_folds"] == 50


def test_kernel_surface_mass():
    pts, _ = ppl_lab.simulate({"type": "poisson", "intensity": 80}, seed=2)
    surf = ppl_lab.kernel_surface(pts, 0.1, resolution=128)
    assert surf.shape == (128, 128)
    assert surf.mean() == pytest.approx(len(pts), rel=5e-3)


def test_experiment_rows():
    rows = ppl_lab.run_experiment({
        "study": "constant_intensity",
        "models": [{"type": "poisson", "intensity": 100}],
        "replicates": 3, "seed": 1, "grid_resolution": 32,
        "cv": [{"kind": "multinomial", "k": 2}], "gammas": [0], "losses": ["L2"],
    })
    assert {r["row_type"] for r in rows} >= {"estimate", "metric"}


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        ppl_lab.fit(np.array([[2.0, 0.5]]), task="constant")
    with pytest.raises(ValueError):
        ppl_lab.simulate({"type": "strauss"})
