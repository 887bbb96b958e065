import numpy as np
import pytest

from eulersim import models
from eulersim.groups import build_cayley_graph, eulerian_cycle
from eulersim.pauli import OperatorSum


@pytest.fixture(scope="session")
def h_iso():
    return models.heisenberg_chain(2, 1.0)


@pytest.fixture(scope="session")
def h_dip():
    return models.dipolar_target(1.0)


@pytest.fixture(scope="session")
def g1():
    closure, gens = models.group_preset("g1")
    return closure


@pytest.fixture(scope="session")
def g1_cycle(g1):
    return eulerian_cycle(build_cayley_graph(g1), g1)


@pytest.fixture(scope="session")
def g_dephasing():
    closure, gens = models.group_preset("g_dephasing")
    return closure


@pytest.fixture(scope="session")
def pauli2():
    closure, gens = models.group_preset("pauli2")
    return closure


@pytest.fixture(scope="session")
def g_gl():
    closure, gens = models.group_preset("g_gl")
    return closure


@pytest.fixture(scope="session")
def honeycomb_lattice():
    return models.HoneycombLattice.plaquette()


@pytest.fixture(scope="session")
def honeycomb_group(honeycomb_lattice):
    from eulersim.groups import close_group

    gens = models.honeycomb_group_generators(honeycomb_lattice)
    return close_group(gens, name="honeycomb")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_operator_sum(rng, n, n_terms=5, scale=1.0) -> OperatorSum:
    """Random Hermitian Pauli sum for property tests."""
    terms = []
    for _ in range(n_terms):
        support = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        letters = {int(q): "XYZ"[rng.integers(0, 3)] for q in support}
        terms.append((float(rng.normal() * scale), letters))
    return OperatorSum.from_label_terms(terms, n)
