import math

import pytest

import lvsim


def small(**kw):
    cfg = {"nodes": 12, "area_side": 800, "horizon": 40, "seed": 5}
    cfg.update(kw)
    return cfg


def test_default_config_round_trips():
    cfg = lvsim.default_config()
    assert cfg["nodes"] == 50
    assert cfg["slotframe_size"] == 101
    assert cfg["channels"] == 16
    out = lvsim.run_once(cfg, horizon=5)
    assert out["scenario"] == "bursty_ppb25"


def test_run_once_is_deterministic_and_conserves():
    a = lvsim.run_once(small(), verify=True)
    b = lvsim.run_once(small(), verify=True)
    assert a == b
    assert a["schedule_violations"] == 0
    assert a["conservation_failures"] == 0
    m = a["metrics"]
    assert m["generated"] == m["delivered"] + m["dropped_queue"] + m["dropped_retry"] + m["in_queues"]
    assert len(a["series"]) == 40


def test_unknown_key_is_rejected():
    with pytest.raises(ValueError):
        lvsim.run_once(small(nodez=3))


def test_campaign_pairs_seeds():
    res = lvsim.campaign(small(), algorithms=["local_voting", "otf"], runs=3)
    assert res["paired"]
    assert len(res["runs"]) == 6
    assert [r["seed"] for r in res["runs"][:3]] == [r["seed"] for r in res["runs"][3:]]
    assert {s["algorithm"] for s in res["summary"]} == {"local_voting", "otf"}


def test_lv_delta_hand_example():
    nbrs = [(20, 0, True), (32, 0, True), (45, 0, False)]
    assert lvsim.lv_delta(14, 0, 0, 15, 5, nbrs) == 3


def test_fairness_indices():
    assert math.isclose(lvsim.jain_index([4, 1, 1]), 2 / 3)
    assert math.isclose(lvsim.g_index([2, 1]), math.sqrt(math.sin(math.pi / 4)))
