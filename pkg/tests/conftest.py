import json
import pathlib

import pytest

from sixnodal.detgeo import DeterminantalInstance, make_instance

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def inst1():
    return make_instance(1)


@pytest.fixture(scope="session")
def golden_instance():
    with open(DATA / "instance_seed1.json", encoding="utf-8") as fh:
        return DeterminantalInstance.from_json(json.load(fh))
