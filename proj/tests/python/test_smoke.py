import json

import pytest

import nsaas


def test_documentation_request_deploys_to_active():
    engine = nsaas.Engine()
    nsi = engine.submit(nsaas.listing_one_request())
    assert nsi["state"] == "Active"
    assert nsi["scenario"] == "URLLC"
    again = engine.submit(nsaas.listing_one_request())
    assert again["id"] == nsi["id"]
    assert len(engine.list()) == 1


def test_reconfigure_keeps_slice_active_with_one_outage():
    engine = nsaas.Engine()
    nsi = engine.submit(nsaas.listing_one_request())
    start = engine.now()
    engine.reconfigure(nsi["id"])
    samples = engine.availability(nsi["id"], start, engine.now() + 5)
    down = [t for t, up in samples if up == 0]
    assert down
    assert max(down) - min(down) == pytest.approx(8.5)
    assert engine.get(nsi["id"])["state"] == "Active"


def test_schema_errors_raise_nsaas_error():
    engine = nsaas.Engine()
    with pytest.raises(nsaas.NsaasError) as info:
        engine.submit({"name": "no NST"})
    reason, _message, details = info.value.args
    assert reason == "SchemaError"
    assert details["field"] == "/NST"


def test_experiments_are_listed_and_deterministic():
    names = nsaas.experiment_names()
    assert "deployment-times" in names
    a = nsaas.run_experiment("deployment-times")
    b = nsaas.run_experiment("deployment-times")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["summary"]["total_s"]["URLLC"] == pytest.approx(53.0, rel=0.10)
    with pytest.raises(nsaas.NsaasError):
        nsaas.run_experiment("no-such-experiment")


def test_cost_fit_and_variation():
    edge = nsaas.fit_cost_model(nsaas.default_price_table(), "Edge")
    assert edge["a"] == pytest.approx(39.42, abs=0.01)
    assert edge["b"] == pytest.approx(3.65, abs=0.01)
    assert edge["c"] == pytest.approx(-22.56, abs=0.01)
    printed = nsaas.printed_cost_models()
    variation = nsaas.tier_variation(printed["Edge"], printed["Central"], 4.8, 17.6)
    assert variation == pytest.approx(116.8, abs=0.5)
