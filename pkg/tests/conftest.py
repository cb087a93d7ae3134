import json

import pytest

from povblock.cli import benchmark_scenario
from povblock.scenario import scenario_to_dict


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario dict as JSON and return the path."""

    def _write(doc: dict, name: str = "scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def total_10_doc():
    """The Total 10% ADV benchmark case as a scenario document."""
    return scenario_to_dict(benchmark_scenario("Total", 0.10))


@pytest.fixture
def total_10_file(write_scenario, total_10_doc):
    return write_scenario(total_10_doc, "total_10.json")
