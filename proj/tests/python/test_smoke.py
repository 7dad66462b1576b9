import json

import _concavepd as cp


def test_generate_is_deterministic():
    a = cp.generate("lot_sizing", n=8, seed=42)
    b = cp.generate("lot_sizing", n=8, seed=42)
    assert a == b
    assert json.loads(a)["type"] == "lot_sizing"


def test_lot_sizing_roundtrip():
    inst = cp.generate("lot_sizing", n=10, seed=7)
    out = cp.solve("concave-lspd", inst)
    assert out["certificate_pass"]
    assert out["primal"] == out["dual"]  # exact algorithm
    report = cp.verify(inst, out["solution"])
    assert report["pass"]
    assert report["bound"] == 1.0


def test_facility_ratio_bound():
    inst = cp.generate("facility_location", m=6, n=4, seed=3)
    out = cp.solve("concave-flpd", inst, with_trace=True)
    assert out["certificate_pass"]
    assert out["primal"] <= 1.61 * out["dual"] + 1e-9
    sol = json.loads(out["solution"])
    assert "trace" in sol and len(sol["trace"]) > 0
    report = cp.verify(inst, out["solution"])
    assert report["pass"] and report["bound"] == 1.61


def test_jrp_factor_four():
    inst = cp.generate("jrp", n=3, K=2, seed=11)
    out = cp.solve("concave-jrppd", inst)
    assert out["certificate_pass"]
    assert out["primal"] <= 4 * out["dual"] + 1e-9
    assert cp.verify(inst, out["solution"])["pass"]


def test_float_backend_with_power_costs():
    inst = cp.generate("facility_location", m=5, n=3, seed=2, cost_mix="power", backend="float")
    out = cp.solve("concave-flpd", inst, backend="float")
    assert out["certificate_pass"]


def test_cost_oracle():
    pwl = json.dumps({"kind": "pwl_min", "pieces": [[0, 2], [2, 1], [6, 0.5]]})
    assert cp.cost_eval(pwl, 4.0) == 6.0
    f, s = cp.cost_tangent(json.dumps({"kind": "power", "a": 0.5, "scale": 1}), 4.0)
    assert abs(f - 1.0) < 1e-12 and abs(s - 0.25) < 1e-12


def test_algorithm_instance_mismatch():
    inst = cp.generate("lot_sizing", n=4, seed=1)
    try:
        cp.solve("flpd", inst)
    except ValueError:
        return
    raise AssertionError("expected a ValueError for mismatched algorithm")
