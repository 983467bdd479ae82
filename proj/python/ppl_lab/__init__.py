"""Point process learning: thinning-based cross-validation for point patterns."""

import csv
import io
import json

from . import _core
from ._core import ComputationError, ValidationError

__all__ = [
    "ComputationError",
    "ValidationError",
    "simulate",
    "fit",
    "run_experiment",
    "kernel_surface",
]

UNIT_SQUARE = (0.0, 1.0, 0.0, 1.0)


def simulate(model, seed=1):
    """Simulate one pattern from a model dict; returns (points, window)."""
    points, window = _core.simulate(json.dumps(model), int(seed))
    return points, tuple(window)


def fit(points, window=UNIT_SQUARE, **options):
    """Fit a single pattern.

    Options mirror the command line: task ("constant", "hardcore",
    "bandwidth"), cv (a dict such as {"kind": "mccv", "p": 0.5, "k": 400}),
    seed, loss, h, f, selector, grid_resolution, landscape.
    """
    return json.loads(_core.fit(points, list(window), json.dumps(options)))


def run_experiment(config, as_rows=True):
    """Run a Monte-Carlo study; returns parsed rows or the raw CSV text."""
    text = _core.run_experiment(json.dumps(config))
    if not as_rows:
        return text
    body = text.split("\n", 1)[1]
    return list(csv.DictReader(io.StringIO(body)))


def kernel_surface(points, bandwidth, window=UNIT_SQUARE, resolution=128, edge_correction=True):
    """Gaussian kernel intensity estimate at the grid cell centres (rows along y)."""
    return _core.kernel_surface(points, list(window), float(bandwidth), int(resolution),
                                bool(edge_correction))
