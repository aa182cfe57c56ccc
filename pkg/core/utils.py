"""
Utility functions shared by the constructions and the CLI.
"""

import json
import logging
from typing import Any, Iterable, List

logger = logging.getLogger(__name__)


def dot_quote(text: str) -> str:
    """Quote a string for use as a Graphviz identifier or label."""
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', r"\""))


def format_state_set(names: Iterable[str]) -> str:
    """Render state names as "{x2,x3,x4}" (names are expected in canonical order)."""
    return "{" + ",".join(names) + "}"


def parse_trace(text: str) -> List[str]:
    """Split an event trace given as "ev ev ev" or "ev,ev,ev" into event names."""
    if not text:
        return []
    tokens = [t.strip() for t in text.replace(",", " ").split()]
    return [t for t in tokens if t]


def parse_name_list(values: Iterable[str]) -> List[str]:
    """Flatten repeated or comma-separated CLI values into a list of names."""
    names: List[str] = []
    for value in values or []:
        if "," in value:
            names.extend(v.strip() for v in value.split(",") if v.strip())
        elif value.strip():
            names.append(value.strip())
    return names


def dumps(payload: Any) -> str:
    """Deterministic JSON text (stable key order given by the payload itself)."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
