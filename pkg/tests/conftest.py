import os
import sys

import pytest

SRC = os.path.join(os.path.dirname(__file__), os.pardir, "src")
if os.path.isdir(SRC):
    sys.path.insert(0, os.path.abspath(SRC))

from indepax import model  # noqa: E402


@pytest.fixture(scope="session")
def binary_sig():
    return model.Signature((("R", 2),))


@pytest.fixture(scope="session")
def ub_sig():
    return model.Signature((("P", 1), ("R", 2)))


@pytest.fixture(scope="session")
def binary_space(binary_sig):
    """All 116 isomorphism classes of size <= 3 over one binary relation."""
    return model.enumerate_models(binary_sig, 3)


@pytest.fixture(scope="session")
def ub_space(ub_sig):
    """All 792 isomorphism classes of size <= 3 over one unary + one binary."""
    return model.enumerate_models(ub_sig, 3)


@pytest.fixture(scope="session")
def unary_space():
    return model.enumerate_models(model.Signature((("P", 1),)), 2)
