"""Multicolor urn CLT simulation and verification.

Thin wrapper over the C++ core: models are loaded from JSON (either a
replacement matrix or a spectral spec), reports come back as dicts.
"""

import json

from ._core import (
    Model,
    limits_json,
    normalized_statistics,
    simulate,
    spectrum_json,
    verify_json,
)

__all__ = [
    "Model",
    "load_model",
    "load_model_file",
    "spectrum",
    "limits",
    "simulate",
    "normalized_statistics",
    "verify",
]


def load_model(text):
    """Parses a model from JSON text."""
    return Model.from_json(text)


def load_model_file(path):
    """Loads a model from a JSON file."""
    return Model.from_file(str(path))


def spectrum(model):
    """Eigenstructure, regime per block, and the stationary distribution."""
    return json.loads(spectrum_json(model))


def limits(model, cross_horizon=1_000_000):
    """Limit covariances per regime."""
    return json.loads(limits_json(model, cross_horizon))


def verify(model, **kwargs):
    """Runs the full verification pipeline; returns the report as a dict."""
    return json.loads(verify_json(model, **kwargs))
