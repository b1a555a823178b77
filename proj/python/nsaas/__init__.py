from ._nsaas import (
    Engine,
    NsaasError,
    default_price_table,
    experiment_names,
    fit_cost_model,
    listing_one_request,
    printed_cost_models,
    run_experiment,
    tier_variation,
)

__all__ = [
    "Engine",
    "NsaasError",
    "default_price_table",
    "experiment_names",
    "fit_cost_model",
    "listing_one_request",
    "printed_cost_models",
    "run_experiment",
    "tier_variation",
]
