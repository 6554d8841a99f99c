"""Pytest fixtures for g2glue tests."""

import numpy as np
import pytest

from g2glue.geometry.cone_calculus import build_cone_g2
from g2glue.geometry.g2_pointwise import standard_g2
from g2glue.geometry.link_algebra import load_link, solve_nk
from g2glue.schemas.config import RunConfig
from g2glue.schemas.params import GlueParams


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator shared by the property tests."""
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def g2():
    """The standard G2 structure φ₀ on R^7."""
    return standard_g2()


@pytest.fixture(scope="session")
def s3xs3():
    """The S³×S³ preset with its unscaled metric shape."""
    return load_link("s3xs3")


@pytest.fixture(scope="session")
def nk(s3xs3):
    """Nearly Kähler structure solved on S³×S³."""
    return solve_nk(s3xs3)


@pytest.fixture(scope="session")
def cone(s3xs3, nk):
    """Cone G2 structure over the solved S³×S³ link."""
    return build_cone_g2(s3xs3, nk)


@pytest.fixture
def glue_params() -> GlueParams:
    """First reference parameter set (μ, ν′, δ, γ) = (1, −4, 0.2, 0.8)."""
    return GlueParams(mu=1.0, nu_prime=-4.0, delta=0.2, gamma=0.8)


@pytest.fixture
def run_config(tmp_path) -> RunConfig:
    """Default run configuration writing into a temporary directory."""
    return RunConfig(output_dir=tmp_path)
