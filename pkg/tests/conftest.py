import warnings
from pathlib import Path

import pytest

import convexuq as cq

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def standard_spec():
    return cq.read_intervals_csv(DATA / "standard_intervals.csv")


@pytest.fixture(scope="session")
def standard_samples():
    return cq.read_samples_csv(DATA / "standard_samples.csv")


@pytest.fixture(scope="session")
def standard_u(standard_spec, standard_samples):
    return cq.regularize(standard_spec, standard_samples).rows


@pytest.fixture(scope="session")
def beam_spec():
    return cq.read_intervals_csv(DATA / "beam_intervals.csv")


@pytest.fixture(scope="session")
def beam_samples():
    return cq.read_samples_csv(DATA / "beam_samples.csv")


@pytest.fixture(scope="session")
def geotech_spec():
    return cq.read_intervals_csv(DATA / "geotech_intervals.csv")


@pytest.fixture(scope="session")
def geotech_samples():
    return cq.read_samples_csv(DATA / "geotech_samples.csv")


@pytest.fixture()
def quiet_degenerate():
    """Silence expected degenerate-fit warnings inside a test."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cq.errors.DegenerateData)
        yield
