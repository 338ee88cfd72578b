"""Python bindings for the inar router and benchmark."""

import json

from ._inar import InarError, integrate_energy, transfer_latency_ms, version
from . import _inar

__all__ = ["InarError", "extract", "route", "simulate", "sweep", "integrate_energy", "transfer_latency_ms", "version"]


def _overrides(options):
    return {k: str(v).lower() if isinstance(v, bool) else str(v) for k, v in options.items()}


def extract(image_path, question, bundle=""):
    """Descriptor (descriptor/1) for an image file and a question."""
    return json.loads(_inar.extract_json(str(image_path), question, str(bundle)))


def route(descriptor, strategy="inar", config_files=(), **options):
    """Routing decision (decision/1). Keyword options are config keys, e.g. bandwidth=10."""
    doc = descriptor if isinstance(descriptor, str) else json.dumps(descriptor)
    return json.loads(_inar.route_json(doc, strategy, [str(p) for p in config_files], _overrides(options)))


def simulate(strategies=(), config_files=(), **options):
    """Strategy comparison on the simulated workload (report/1)."""
    return json.loads(_inar.simulate_json(list(strategies), [str(p) for p in config_files], _overrides(options)))


def sweep(strategy, bandwidths, config_files=(), **options):
    """Bandwidth sweep rows for one strategy."""
    return json.loads(_inar.sweep_json(strategy, list(bandwidths), [str(p) for p in config_files], _overrides(options)))
