import numpy as np
import pytest

from hsplit.manifold import SPD, Euclidean, Hyperboloid, Product


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=["euclidean", "hyperboloid", "spd", "product"])
def manifold(request):
    return {
        "euclidean": Euclidean(3),
        "hyperboloid": Hyperboloid(2),
        "spd": SPD(2),
        "product": Product((Euclidean(2), Hyperboloid(2))),
    }[request.param]
