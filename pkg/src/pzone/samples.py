"""Bundled example models."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import Pta, parse_model


def fixture_names() -> list[str]:
    root = resources.files("pzone") / "fixtures"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".pta"))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("pzone") / "fixtures" / f"{name}.pta"))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def load_fixture(name: str) -> Pta:
    return parse_model(fixture_text(name))
