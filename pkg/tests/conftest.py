import pytest

from pricegate import parse_pricing
from pricegate.fixtures import fixture_text
from pricegate.expr import vm as pure_vm

_BACKENDS = {"pure": pure_vm.run_program}
try:
    from pricegate.expr import _fastvm

    _BACKENDS["compiled"] = _fastvm.run_program
except ImportError:
    pass


@pytest.fixture(params=sorted(_BACKENDS))
def run_backend(request):
    """Interpreter entry point, parametrized over every built backend.

    Tests using this fixture assert identical behaviour from the pure
    interpreter and the compiled one (when the extension is present).
    """
    return _BACKENDS[request.param]


@pytest.fixture()
def petclinic_text() -> str:
    return fixture_text("petclinic.yaml")


@pytest.fixture()
def petclinic_v2_text() -> str:
    return fixture_text("petclinic_v2.yaml")


@pytest.fixture()
def pricing(petclinic_text):
    return parse_pricing(petclinic_text)


@pytest.fixture()
def pricing_v2(petclinic_v2_text):
    return parse_pricing(petclinic_v2_text)
