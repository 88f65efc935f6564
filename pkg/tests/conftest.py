import numpy as np
import pytest

from qpindex import models
from qpindex.wienerhopf import assumption_check


@pytest.fixture(scope="session")
def paper2d():
    return models.paper_2d()


@pytest.fixture(scope="session")
def paper3d():
    return models.paper_3d()


@pytest.fixture(scope="session")
def eps_model():
    return models.trivial_eps()


@pytest.fixture(scope="session")
def gap2d(paper2d):
    H, _ = paper2d
    return assumption_check(H)


@pytest.fixture(scope="session")
def gap3d(paper3d):
    fam, _ = paper3d
    return assumption_check(fam)


@pytest.fixture(scope="session")
def flows12(paper3d, gap3d):
    from qpindex.boundary import spectral_flows

    fam, sym = paper3d
    return spectral_flows(fam, sym, L=12, theta_samples=64, gap=gap3d)


@pytest.fixture(scope="session")
def corner_values(paper2d, gap2d):
    from qpindex.boundary import corner_indices

    H, sym = paper2d
    values, diags = corner_indices(H, sym, L=24, gap=gap2d)
    return values, diags


def random_unitary(rng, n):
    mat = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(mat)
    return q * (np.diag(r) / np.abs(np.diag(r)))
