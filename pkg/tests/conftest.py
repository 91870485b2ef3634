"""Shared fixtures: frozen oracle data and reusable witness clouds."""

import json
import os

import pytest

from ratpot import catalog, equilibrium, escape

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def oracle() -> dict:
    with open(os.path.join(DATA_DIR, "oracle_values.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def rng_golden() -> dict:
    with open(os.path.join(DATA_DIR, "rng_golden.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def suite_maps() -> dict:
    return dict(catalog.suite_maps())


@pytest.fixture(scope="session")
def evaluators(suite_maps) -> dict:
    return {name: escape.evaluator_for(f) for name, f in suite_maps.items()}


@pytest.fixture(scope="session")
def witnesses_10k(suite_maps) -> dict:
    """One 10^4-point witness cloud per suite map at the sampler default."""
    cfg = equilibrium.SamplerConfig(n_samples=10_000, burn_in=30, seed=0)
    return {name: equilibrium.sample_julia(f, cfg)
            for name, f in suite_maps.items()}
