"""Bundled example pricing documents.

petclinic.yaml is the canonical demo document; petclinic_v2.yaml is the
same catalogue with the PLATINUM "pets per owner" limit lowered from 7
to 4 (and the version bumped), which exercises diffing and hot swaps.
"""

from importlib import resources

from pricegate.documents import parse_pricing
from pricegate.model import Pricing


def fixture_text(name: str = "petclinic.yaml") -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def load_fixture(name: str = "petclinic.yaml") -> Pricing:
    return parse_pricing(fixture_text(name))


def petclinic() -> Pricing:
    return load_fixture("petclinic.yaml")


def petclinic_v2() -> Pricing:
    return load_fixture("petclinic_v2.yaml")
