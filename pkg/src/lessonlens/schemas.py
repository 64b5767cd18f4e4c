"""Registry of structured-response payload schemas.

A tiny declarative validator covers everything the engine needs: objects
with required fields, arrays with item schemas, bounded integers, enums,
and non-empty strings. ``generate`` never returns a payload that fails its
declared schema.
"""

from __future__ import annotations

from typing import Any


def obj(**fields: dict) -> dict:
    return {"type": "object", "fields": fields}


def arr(item: dict, min_items: int = 0, max_items: int | None = None) -> dict:
    return {"type": "array", "item": item, "min_items": min_items, "max_items": max_items}


def string(non_empty: bool = True) -> dict:
    return {"type": "string", "non_empty": non_empty}


def integer(minimum: int | None = None, maximum: int | None = None) -> dict:
    return {"type": "integer", "minimum": minimum, "maximum": maximum}


def enum(*values: str) -> dict:
    return {"type": "enum", "values": values}


def boolean() -> dict:
    return {"type": "boolean"}


def check(schema: dict, doc: Any, path: str = "$") -> list[str]:
    """Return a list of violations; empty means the document validates."""
    kind = schema["type"]
    if kind == "object":
        if not isinstance(doc, dict):
            return [f"{path}: expected object, got {type(doc).__name__}"]
        errors = []
        for name, sub in schema["fields"].items():
            if name not in doc:
                errors.append(f"{path}.{name}: missing")
            else:
                errors.extend(check(sub, doc[name], f"{path}.{name}"))
        return errors
    if kind == "array":
        if not isinstance(doc, list):
            return [f"{path}: expected array, got {type(doc).__name__}"]
        errors = []
        if len(doc) < schema["min_items"]:
            errors.append(f"{path}: needs at least {schema['min_items']} items")
        if schema["max_items"] is not None and len(doc) > schema["max_items"]:
            errors.append(f"{path}: allows at most {schema['max_items']} items")
        for i, item in enumerate(doc):
            errors.extend(check(schema["item"], item, f"{path}[{i}]"))
        return errors
    if kind == "string":
        if not isinstance(doc, str):
            return [f"{path}: expected string, got {type(doc).__name__}"]
        if schema["non_empty"] and not doc.strip():
            return [f"{path}: must be non-empty"]
        return []
    if kind == "integer":
        if not isinstance(doc, int) or isinstance(doc, bool):
            return [f"{path}: expected integer, got {type(doc).__name__}"]
        if schema["minimum"] is not None and doc < schema["minimum"]:
            return [f"{path}: must be >= {schema['minimum']}"]
        if schema["maximum"] is not None and doc > schema["maximum"]:
            return [f"{path}: must be <= {schema['maximum']}"]
        return []
    if kind == "enum":
        if doc not in schema["values"]:
            return [f"{path}: expected one of {schema['values']}, got {doc!r}"]
        return []
    if kind == "boolean":
        if not isinstance(doc, bool):
            return [f"{path}: expected boolean, got {type(doc).__name__}"]
        return []
    raise ValueError(f"unknown schema kind {kind!r}")


_interval_fields = {
    "start_ms": integer(minimum=0),
    "end_ms": integer(minimum=0),
}

REGISTRY: dict[str, dict] = {
    "hotspots/v1": obj(
        hotspots=arr(
            obj(
                **_interval_fields,
                dimension_id=string(),
                polarity=enum("STRENGTH", "WEAKNESS"),
                trigger_excerpt=string(),
            )
        )
    ),
    "guidelines/v1": obj(guidelines=arr(string(), min_items=1, max_items=5)),
    "feedback_draft/v1": obj(
        content=string(),
        observed_behaviors=string(),
        actionable_advice=string(),
    ),
    "bloom/v1": obj(level=integer(minimum=1, maximum=6), justification=string()),
    "activities/v1": obj(
        activities=arr(obj(**_interval_fields, codes=arr(string(), min_items=1)))
    ),
    "outline/v1": obj(
        sections=arr(obj(**_interval_fields, heading=string(), summary=string()), min_items=1)
    ),
    "search_query/v1": obj(query=string()),
    "rerank/v1": obj(keep=arr(obj(clip_id=string(), explanation=string()))),
}


def is_registered(schema_id: str) -> bool:
    return schema_id in REGISTRY


def validate_payload(schema_id: str, payload: Any) -> list[str]:
    if schema_id not in REGISTRY:
        return [f"unregistered schema {schema_id!r}"]
    return check(REGISTRY[schema_id], payload)
