"""Shared fixtures: small deterministic problem instances."""

from __future__ import annotations

import numpy as np
import pytest

from svilab import bimatrix_from_payoff, make_affine_strongly_monotone

PENNIES = np.array([[1.0, -1.0], [-1.0, 1.0]])


@pytest.fixture(scope="session")
def pennies_problem():
    """Matching pennies with its exact mixed equilibrium (0.5, 0.5)."""
    return bimatrix_from_payoff(PENNIES, noise_scale=0.0, seed=0)


@pytest.fixture(scope="session")
def affine_problem():
    """Strongly monotone affine instance with a known interior root."""
    return make_affine_strongly_monotone(n=6, mu=0.7, lipschitz=3.0, sigma=0.0, seed=11)
