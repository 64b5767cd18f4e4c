"""Access to packaged default data: rubric, activity taxonomy, mock rules."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .model import Rubric, rubric_from_dict


def _load_packaged(name: str) -> dict:
    with resources.files("lessonlens.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def default_rubric() -> Rubric:
    return rubric_from_dict(_load_packaged("default_rubric.json"))


def default_taxonomy() -> dict:
    return _load_packaged("default_taxonomy.json")


def default_mock_rules() -> dict:
    return _load_packaged("mock_rules.json")


def load_json_file(path: str | Path) -> dict:
    return json.loads(Path(path).read_text("utf-8"))


def load_rubric_file(path: str | Path) -> Rubric:
    return rubric_from_dict(load_json_file(path))
