import numpy as np
import pytest
from hypothesis import settings

from kacdouble.algebra_zoo import BUILTIN_GROUPS, builtin, function_algebra
from kacdouble.hopf_core import dual

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

BUILTINS = sorted(BUILTIN_GROUPS)


@pytest.fixture(scope="session")
def Z2():
    return builtin("Z2")


@pytest.fixture(scope="session")
def Z3():
    return builtin("Z3")


@pytest.fixture(scope="session")
def S3():
    return builtin("S3")


@pytest.fixture(scope="session")
def dS3():
    return dual(builtin("S3"))


def random_element(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
