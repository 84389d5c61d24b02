"""Smoke tests for the braess extension module."""

import json

import pytest

import braess

THETA = json.dumps(
    {
        "nodes": ["s", "u", "v", "t"],
        "source": "s",
        "sink": "t",
        "rate": "1/1",
        "edges": [
            {"id": "su", "tail": "s", "head": "u", "latency": {"type": "linear", "a": "1/1"}},
            {"id": "ut", "tail": "u", "head": "t", "latency": {"type": "linear", "a": "1/1"}},
            {"id": "sv", "tail": "s", "head": "v", "latency": {"type": "linear", "a": "1/1"}},
            {"id": "vt", "tail": "v", "head": "t", "latency": {"type": "linear", "a": "1/1"}},
            {"id": "uv", "tail": "u", "head": "v", "latency": {"type": "linear", "a": "1/1"}},
        ],
    }
)

DDP_YES = json.dumps(
    {
        "nodes": ["s1", "s2", "t1", "t2"],
        "s1": "s1",
        "s2": "s2",
        "t1": "t1",
        "t2": "t2",
        "edges": [
            {"id": "a", "tail": "s1", "head": "t1"},
            {"id": "b", "tail": "s2", "head": "t2"},
            {"id": "c", "tail": "s1", "head": "t2"},
            {"id": "d", "tail": "s2", "head": "t1"},
        ],
    }
)


@pytest.fixture
def theta():
    return braess.parse_instance(THETA)


def test_parse_and_roundtrip(theta):
    assert theta.num_edges == 5
    again = braess.parse_instance(braess.emit_instance(theta))
    assert braess.emit_instance(again) == braess.emit_instance(theta)


def test_paths_and_cuts(theta):
    paths = braess.enumerate_paths(theta)
    assert len(paths) == 3
    assert ["su", "uv", "vt"] in paths
    cuts = braess.enumerate_st_cuts(theta)
    assert len(cuts) == 4


def test_figure_one_quantities(theta):
    assert braess.optimal_bottleneck_cost(theta)["cost"] == "1/2"
    worst = braess.worst_nash_flow(theta)
    assert worst["cost"] == "1/1"
    assert braess.price_of_anarchy(theta) == "2/1"


def test_classification(theta):
    report = braess.classify_paradox(theta)
    assert report["classification"] == "paradox-ridden"
    assert report["worst_cost"] == "1/2"
    assert report["improvement"] == "2/1"
    assert sorted(report["subnetwork"]) == ["su", "sv", "ut", "vt"]


def test_nash_certificates(theta):
    middle = [(["su", "uv", "vt"], "1/1")]
    cert = braess.is_nash_flow(theta, middle)
    assert cert["verdict"] is True
    split = [(["su", "ut"], "1/1")]
    cert = braess.is_nash_flow(theta, split)
    assert cert["verdict"] is False
    assert cert["violation"] == ["sv", "vt"]


def test_subpath_optimal(theta):
    res = braess.subpath_optimal_nash_flow(theta)
    flows = {tuple(p): v for p, v in res["flow"]}
    assert flows == {("su", "ut"): "1/2", ("sv", "vt"): "1/2"}


def test_sparsify_and_k(theta):
    assert braess.k_of_eps("1/2", 8) == 6
    half = [(["su", "ut"], "1/2"), (["sv", "vt"], "1/2")]
    out = braess.sparsify_flow(theta, half, "1/2")
    assert out["size"] == 2


def test_gap_generation():
    gap = braess.parse_instance(braess.gen_gap(DDP_YES, eps="1/8", rate="12/1"))
    assert len(gap.nodes) == 8
    assert gap.num_edges == 13
    assert braess.optimal_bottleneck_cost(gap)["cost"] == "3/1"
    assert braess.worst_nash_flow(gap)["cost"] == "4/1"
    verdict = braess.classify_2ddp(DDP_YES)
    assert verdict["yes"] is True


def test_series_parallel(theta):
    assert braess.is_series_parallel(theta) is False


def test_cli_entry(tmp_path):
    instance = tmp_path / "theta.json"
    instance.write_text(THETA)
    code, out, err = braess.run_cli(["poa", "-i", str(instance)])
    assert code == 0
    doc = json.loads(out)
    assert doc["outputs"]["poa"] == "2/1"
