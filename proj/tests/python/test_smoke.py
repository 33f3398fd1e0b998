import json
import math
import subprocess

import pytest

nmating = pytest.importorskip("nmating")


def test_angle_basics():
    a = nmating.Angle("2/3")
    assert str(a) == "2/3"
    assert a.triadic
    assert math.isclose(float(a), 2 / 3)
    assert str(a.times(3)) == "0/1"
    b = nmating.Angle("1/6")
    assert not b.triadic
    assert str(b.negated()) == "5/6"


def test_itinerary_classes():
    assert nmating.itinerary("2/3") == ["1|2", "2|0"]
    assert nmating.itinerary("1/2") == ["|1"]
    w = nmating.Word("1|0")
    assert w.theta() == "1/3"
    assert str(w.shifted()) == "|0"


def test_ray_landing():
    landed, (re, im), level = nmating.trace_ray("sym", 0j, "0")
    assert landed
    # the fixed external ray of z^3 + 1.5z comes in along the positive real
    # axis and lands at the repelling fixed point 0
    assert abs(re) < 1e-5 and abs(im) < 1e-5


def test_cli_itinerary(pytestconfig):
    cli = pytestconfig.getoption("--nmating-cli")
    if not cli:
        pytest.skip("cli path not provided")
    out = subprocess.run([cli, "itinerary", "--angle", "1/3", "--json"],
                         capture_output=True, text=True, check=True)
    data = json.loads(out.stdout)
    assert data["words"] == ["0|2", "1|0"]
    assert data["triadic"] is True
