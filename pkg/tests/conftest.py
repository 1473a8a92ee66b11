import pytest

from jitai.domain import load_catalog, load_prior_table


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def priors(catalog):
    return load_prior_table(None, catalog)
