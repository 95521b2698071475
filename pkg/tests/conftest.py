import json
from pathlib import Path

import pytest

from patchglue.polyhedra import Subdivision

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"
SUBDIVISION_FIXTURES = ["p2-line", "model-1d", "p2-fan", "p1p1-fan"]


def load_subdivision(name: str) -> Subdivision:
    return Subdivision.from_dict(json.loads((FIXTURE_DIR / (name + ".json")).read_text()))


@pytest.fixture(params=SUBDIVISION_FIXTURES)
def shipped(request):
    return request.param, load_subdivision(request.param)
