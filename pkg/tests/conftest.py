import random

import pytest
from hypothesis import settings

from friedlab.group_model import build_preset
from friedlab.lattice_data import synthesize_classes
from friedlab.lie_characters import TorusElement
from friedlab.representations import find_admissible_metric, parse_rep_spec
from friedlab import eta_pipeline as ep

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sl2c():
    return build_preset("sl2c")


@pytest.fixture(scope="session")
def rline_su2():
    return build_preset("rline_x_su2")


@pytest.fixture(scope="session")
def rep_pair(sl2c):
    return parse_rep_spec(sl2c, "1,0++0,1")


@pytest.fixture(scope="session")
def fam_pair(rep_pair):
    return ep.compute_eta_family(rep_pair)


@pytest.fixture(scope="session")
def fam_trivial(sl2c):
    return ep.compute_eta_family(parse_rep_spec(sl2c, "triv"))


@pytest.fixture(scope="session")
def fam_direct(rline_su2):
    return ep.compute_eta_family(parse_rep_spec(rline_su2, "1/2;1+theta"), mode="direct")


@pytest.fixture(scope="session")
def classes50():
    return synthesize_classes(seed=7, count=50).records


def random_torus(seed: int, count: int, dt: int = 1, db: int = 1) -> list:
    """Seeded non-elliptic torus elements."""
    rng = random.Random(seed)
    return [TorusElement(tuple(rng.uniform(0.1, 3.0) for _ in range(db)),
                         tuple(rng.uniform(-3.14, 3.14) for _ in range(dt)))
            for _ in range(count)]


def metric_rep(model, spec: str):
    """Parsed representation with its admissible metric installed."""
    r = parse_rep_spec(model, spec)
    find_admissible_metric(r)
    return r
