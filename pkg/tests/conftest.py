import pytest
from hypothesis import HealthCheck, settings

from diffrest.fixtures import two_singletons

_quiet = [HealthCheck.too_slow, HealthCheck.filter_too_much]
settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=_quiet)
settings.register_profile("thorough", max_examples=400, deadline=None, suppress_health_check=_quiet)
settings.load_profile("default")


@pytest.fixture
def singletons():
    return two_singletons()
