import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from anisotropy.complex import load_complex

CORPUS = Path(__file__).resolve().parents[1] / "src" / "anisotropy" / "corpus"
PSEUDO_MANIFOLDS = ["boundary_simplex_2", "boundary_simplex_3", "boundary_simplex_4", "octahedron",
                    "bipyramid", "rp2_6"]
SPHERES = ["boundary_simplex_2", "boundary_simplex_3", "boundary_simplex_4", "octahedron", "bipyramid"]

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def corpus(name):
    return load_complex(CORPUS / f"{name}.json")[0]


@pytest.fixture(params=PSEUDO_MANIFOLDS)
def pm(request):
    return corpus(request.param)


@pytest.fixture(params=SPHERES)
def sphere(request):
    return corpus(request.param)
