"""Shared fixtures for the expensive session-wide artifacts.

The figure bundle and the five tabulated exponent fits together cost more
than a minute of kernel time, so each is produced exactly once per session
and shared between the CLI tests and the acceptance gate.
"""

import time

import pytest
from hypothesis import HealthCheck, settings

from jacspec import cli
from jacspec.transition import fit_exponent
from jacspec.weights import WeightSequence

settings.register_profile(
    "jacspec",
    derandomize=True,
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("jacspec")

TESTED_ALPHAS = (0.55, 0.6, 2.0 / 3.0, 0.75, 0.8)


@pytest.fixture(scope="session")
def figure_bundle(tmp_path_factory):
    """Directory holding one real `jacspec figures` run."""
    out = tmp_path_factory.mktemp("figures")
    rc = cli.main(["figures", "--out", str(out)])
    return {"dir": out, "returncode": rc}


@pytest.fixture(scope="session")
def default_fits():
    """Exponent fits at the tabulated alphas plus their total wall time."""
    t0 = time.perf_counter()
    fits = {a: fit_exponent(WeightSequence(a)) for a in TESTED_ALPHAS}
    elapsed = time.perf_counter() - t0
    return fits, elapsed
