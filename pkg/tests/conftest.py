import pytest

from layernet import scenarios


# Function scope on purpose: several tests mutate their topology, and the
# parser is cheap enough that fresh copies beat defensive deep-copying.


@pytest.fixture
def service_customer():
    return scenarios.scenario("service-customer")


@pytest.fixture
def enterprise_basic():
    return scenarios.scenario("enterprise-basic")


@pytest.fixture
def enterprise_vpn():
    return scenarios.scenario("enterprise-vpn")


@pytest.fixture
def service_hipaa():
    return scenarios.scenario("service-hipaa")
