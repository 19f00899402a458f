"""Enumeration caps, overridable through the L2GROWTH_CAPS environment variable.

Format: ``L2GROWTH_CAPS="bfs=20,order=100000,eig=2000"``.  Keys:

* ``bfs``     - maximum word length explored by BFS in matrix groups
* ``visited`` - maximum number of BFS-visited elements
* ``order``   - maximum order of a realized finite quotient / cover instantiation
* ``eig``     - maximum matrix size handed to the dense eigensolver
* ``short``   - maximum radius for abelian shortest-vector enumeration
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    bfs_length: int = 20
    bfs_visited: int = 1_000_000
    order: int = 100_000
    eig: int = 2000
    short: int = 128

    @classmethod
    def from_env(cls) -> "Caps":
        caps = cls()
        raw = os.environ.get("L2GROWTH_CAPS", "")
        if not raw.strip():
            return caps
        fields = {
            "bfs": "bfs_length",
            "visited": "bfs_visited",
            "order": "order",
            "eig": "eig",
            "short": "short",
        }
        updates = {}
        for piece in raw.split(","):
            piece = piece.strip()
            if not piece:
                continue
            key, _, value = piece.partition("=")
            key = key.strip().lower()
            if key in fields:
                try:
                    updates[fields[key]] = int(value)
                except ValueError:
                    raise ValueError(f"bad cap value in L2GROWTH_CAPS: {piece!r}")
            else:
                raise ValueError(f"unknown cap name in L2GROWTH_CAPS: {key!r}")
        return replace(caps, **updates)


DEFAULT_CAPS = Caps.from_env()
