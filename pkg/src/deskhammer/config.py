"""Service configuration file: corpus location, external prover command
templates, and default limits.

JSON, e.g.:

    {
      "corpus": "articles/",
      "default_timeout_ms": 10000,
      "provers": {
        "eprover": "eprover --auto --cpu-limit={timeout_s} {problem}"
      }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .prover import ExternalProver


@dataclass(frozen=True, slots=True)
class ServiceConfig:
    corpus: str = "demo"
    default_timeout_ms: int = 10_000
    provers: dict[str, ExternalProver] = field(default_factory=dict)


def load_config(path: str | Path) -> ServiceConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    provers = {}
    for name, command in raw.get("provers", {}).items():
        if "{problem}" not in command:
            raise ValueError(f"prover {name!r} command lacks a {{problem}} placeholder")
        provers[name] = ExternalProver(name, command)
    timeout = int(raw.get("default_timeout_ms", 10_000))
    if timeout <= 0:
        raise ValueError("default_timeout_ms must be positive")
    return ServiceConfig(
        corpus=raw.get("corpus", "demo"),
        default_timeout_ms=timeout,
        provers=provers,
    )
