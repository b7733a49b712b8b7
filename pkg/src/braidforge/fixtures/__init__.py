"""Canonical graph fixtures shipped with the package."""

import json
from importlib import resources

NAMES = ("theta", "y", "path", "lasso")


def fixture_path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {NAMES}")
    return resources.files(__name__) / f"{name}.json"


def load_fixture(name: str) -> dict:
    return json.loads(fixture_path(name).read_text())
