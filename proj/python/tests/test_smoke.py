import cmath
import json
import math

import pytest

import pvi


def test_routes_listed():
    names = pvi.routes()
    assert "TwoTwoA" in names and "TauL01" in names


def test_gauss_2f1_log():
    # 2F1(1, 1; 2; z) = -log(1 - z) / z
    z = 0.5
    assert pvi.gauss_2f1(1, 1, 2, z) == pytest.approx(-math.log(1 - z) / z, rel=1e-15)
    w = 0.3 + 0.4j
    assert abs(pvi.gauss_2f1(1, 1, 2, w) - (-cmath.log(1 - w) / w)) < 1e-14


def test_moments_are_hermitian_without_the_jump_factor():
    # mu = 0 removes the (1 + tz) factor, leaving the positive weight |1 + z|^{2 omega1}
    w = pvi.moments("0", "0.2", "0", "0", "pi/3", 3)
    assert set(w) == set(range(-3, 4))
    for n in range(1, 4):
        assert abs(w[n] - w[-n].conjugate()) < 1e-14


def test_route_matches_oracle():
    args = ("0.3", "0.2", "0.1", "0.4", "pi/3", 6)
    ref = pvi.reflection_table(*args)
    for route in ("TwoTwoA", "DPainleveGF"):
        got = pvi.reflection_table(*args, route=route)
        for n in range(1, 7):
            assert abs(got["r"][n] - ref["r"][n]) < 1e-14 * abs(ref["r"][n])
            assert abs(got["T"][n] - ref["T"][n]) < 1e-14 * abs(ref["T"][n])
    tau = pvi.reflection_table(*args, route="TauL01")
    assert "r" not in tau
    assert abs(tau["T"][6] - ref["T"][6]) < 1e-14 * abs(ref["T"][6])


def test_degenerate_omega_raises():
    with pytest.raises(pvi.PviError, match="DegenerateOmega"):
        pvi.reflection_table("0.3", "0.2", "0", "0.4", 1.0, 3, route="TwoOnePair")
    with pytest.raises(ValueError):
        pvi.reflection_table("0.3", "0.2", "0.1", "0.4", 1.0, 3, route="NoSuchRoute")


def test_identity_residuals_small():
    res = pvi.identity_residuals("0.3", "0.2", "0.1", "0.4", "pi/3", 2, samples=1)
    assert "christoffel-darboux" in res
    assert max(res.values()) < 1e-20


def test_cue_gap_first_value():
    res = pvi.cue_gap("pi/2", 1, 4)
    assert res["quantity"] == "E_N"
    assert res["value"][1] == pytest.approx(0.75, abs=1e-15)
    assert res["max_deviation"] < 1e-20


def test_cue_charpoly_unit_circle():
    # |u| = 1, mu = 1: F_N = N + 1
    res = pvi.cue_charpoly(1, 1, 4)
    for n, v in enumerate(res["value"]):
        assert v == pytest.approx(n + 1, rel=1e-15)


def test_ising_critical():
    res = pvi.ising(1, "low", 3)
    expected = 1.0
    for j in range(1, 4):
        expected *= math.gamma(j) ** 2 / (math.gamma(j + 0.5) * math.gamma(j - 0.5))
        assert res["value"][j].real == pytest.approx(expected, rel=1e-14)
    assert pvi.ising("inf", "low", 2)["value"] == [1, 1, 1]


def test_run_json_matches_cli_schema():
    text, code = pvi.run("compute", mu="0.3", omega1="0.2", omega2="0.1", xi="0.4", phi="pi/3", n_max=2,
                         routes=["oracle", "TwoTwoA"], bits=128, tol=1e-25, format="json")
    assert code == 0
    doc = json.loads(text)
    assert doc["command"] == "compute"
    assert len(doc["rows"]) == 4
    assert float(doc["max_deviation"]) < 1e-25
    with pytest.raises(TypeError):
        pvi.run("compute", no_such_option=1)
