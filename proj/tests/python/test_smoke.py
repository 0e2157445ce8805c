import json

import pytest

import cooproute


def test_canonical_presets():
    assert len(cooproute.preset_names()) == 8
    assert set(cooproute.preset_names()) < set(cooproute.preset_names(True))


def test_solve_returns_verified_equilibria():
    eqs = cooproute.solve(preset="braess-lb-asym", param=10.0)
    assert len(eqs) >= 2
    for eq in eqs:
        assert eq["kkt_residual"] <= 1e-6
        for user, flows in enumerate(eq["path_flows"]):
            assert sum(flows) == pytest.approx([2.0, 1.0][user], abs=1e-12)
    # All of user 1 on its direct link, all of user 2 on its direct link.
    direct = [eq for eq in eqs if eq["raw_cost"][0] == pytest.approx(1 / 1.05)]
    assert direct and direct[0]["raw_cost"][1] == pytest.approx(1 / 3.1)


def test_verify_rejects_perturbed_profile():
    eq = cooproute.solve(preset="braess-lb-asym", param=10.0)[0]
    assert cooproute.verify(eq["path_flows"], preset="braess-lb-asym",
                            param=10.0)["passed"]
    moved = [list(f) for f in eq["path_flows"]]
    shift = 0.05 if moved[1][0] >= 0.05 else -0.05
    moved[1][0] -= shift
    moved[1][1] += shift
    assert not cooproute.verify(moved, preset="braess-lb-asym",
                                param=10.0)["passed"]


def test_infeasible_preset_raises():
    with pytest.raises(cooproute.InfeasibleError, match="r1\\+r2 >= C1\\+C2"):
        cooproute.solve(preset="exp4")


def test_config_errors_name_the_field():
    doc = {
        "links": [{"id": 1, "from": 1, "to": 2,
                   "cost": {"kind": "linear", "a": 1, "g": 0}}],
        "users": [{"id": 1, "source": 1, "dest": 2, "demand": -1}],
    }
    with pytest.raises(cooproute.ConfigError, match="demand must be nonnegative"):
        cooproute.canonical_config(json.dumps(doc))
    doc["users"][0]["demand"] = 1
    doc["extra"] = True
    with pytest.raises(cooproute.ConfigError, match="unknown key 'extra'"):
        cooproute.canonical_config(json.dumps(doc))


def test_canonical_config_is_a_fixed_point():
    doc = {
        "topology": "parallel",
        "links": [
            {"id": 1, "from": 1, "to": 2, "cost": {"kind": "mm1", "capacity": 4.1}},
            {"id": 2, "from": 1, "to": 2, "cost": {"kind": "mm1", "capacity": 4.1}},
        ],
        "users": [
            {"id": 1, "source": 1, "dest": 2, "demand": 1, "alpha": 0.2},
            {"id": 2, "source": 1, "dest": 2, "demand": 1, "alpha": 0.2},
        ],
    }
    once = cooproute.canonical_config(json.dumps(doc))
    assert cooproute.canonical_config(once) == once
    eqs = cooproute.solve(config=once)
    assert len(eqs) == 1


def test_sweep_csv_and_report():
    doc = json.loads(cooproute.canonical_config(json.dumps({
        "topology": "parallel",
        "links": [
            {"id": 1, "from": 1, "to": 2, "cost": {"kind": "mm1", "capacity": 4.1}},
            {"id": 2, "from": 1, "to": 2, "cost": {"kind": "mm1", "capacity": 4.1}},
        ],
        "users": [
            {"id": 1, "source": 1, "dest": 2, "demand": 1},
            {"id": 2, "source": 1, "dest": 2, "demand": 1},
        ],
        "sweep": {"param": "alpha", "from": 0, "to": 0.2, "step": 0.1,
                  "mode": "symmetric"},
    })))
    csv, report = cooproute.sweep(config=json.dumps(doc))
    lines = csv.strip().split("\n")
    assert lines[0].startswith("param,cluster,basin_count,J_1,Jhat_1")
    assert len(lines) == 4
    assert json.loads(report)["kind"] == "cooperation"


def test_symmetric_mixed_interior_point():
    out = cooproute.mixed(4.0, 4.0, 1.0, 1.0, 0.3)
    xs = [(s["x"], s["w2"]) for s in out["numeric"]]
    assert xs == [pytest.approx((0.5, 0.5), abs=1e-9)]
    cf = [(s["x"], s["w2"]) for s in out["closed_form"]]
    assert cf == [pytest.approx((0.5, 0.5), abs=1e-9)]
    assert cooproute.wardrop_split(4.0, 3.0, 1.0, 0.0, 1.0) == pytest.approx(
        (0.5, 0.5), abs=1e-12)
