import json
from pathlib import Path

import pytest

import inar

FIXTURES = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


def test_version():
    assert inar.version()


def test_extract_fixture_in_range():
    d = inar.extract(FIXTURES / "sharp.png", "What is the total?")
    assert d["schema"] == "descriptor/1"
    assert 0.0 <= d["d"] <= 1.0
    for key in ("s_blur", "s_exp", "s_art", "s_detail"):
        assert 0.0 <= d["image"][key] <= 1.0


def test_extract_matches_cli_golden():
    golden = json.loads((FIXTURES / "sharp_total.descriptor.json").read_text())
    d = inar.extract(FIXTURES / "sharp.png", "What is the total?")
    d.pop("overhead_ms")
    assert d == golden


def test_route_below_guard():
    d = inar.extract(FIXTURES / "blurred.png", "Why is the man holding the sign?")
    decision = inar.route(d, bandwidth=10)
    assert decision["reason"] == "BandwidthGuard"
    assert decision["chosen"]["placement"] == "edge"


def test_route_cloud_only_above_guard():
    d = inar.extract(FIXTURES / "sharp.png", "What is it?")
    assert inar.route(d, strategy="cloud", bandwidth=100)["chosen"]["placement"] == "cloud"


def test_simulate_small_run():
    report = inar.simulate(["edge", "cloud", "inar"], n_requests=200, replicates=1)
    rows = {r["strategy"]: r for r in report["strategies"]}
    assert rows["Edge-Only"]["edge_frac"] == 1.0
    assert rows["Cloud-Only"]["edge_frac"] == 0.0
    for r in rows.values():
        assert r["edge_count"] + r["cloud_count"] == r["n"]


def test_sweep_below_guard_all_edge():
    rows = inar.sweep("inar", [5, 10, 100], n_requests=200, replicates=1)
    assert rows[0]["edge_frac"] == 1.0
    assert rows[1]["edge_frac"] == 1.0


def test_energy_and_transfer():
    assert inar.integrate_energy([(0, 22), (1000, 22), (2000, 22), (3000, 22)], 12) == pytest.approx(30.0)
    assert abs(inar.transfer_latency_ms(250_000, 15) - 133.3) < 0.5


def test_errors_raise():
    with pytest.raises(inar.InarError):
        inar.extract(FIXTURES / "missing.png", "What?")
    with pytest.raises(inar.InarError):
        inar.sweep("inar", [100, 10], n_requests=50, replicates=1)
