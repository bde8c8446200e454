"""Named real-world edgelists.

Karate ships with the package. The others are looked up as
``<DPPR_DATA_DIR>/<name>.edges`` (``.txt`` also accepted); the expected
statistics below let callers confirm a file is the intended network.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .graph import Graph, parse_edgelist

DATA_ENV = "DPPR_DATA_DIR"

# nodes, edges, average degree (2 decimals)
TABLE_STATS = {
    "karate": (34, 78, 4.59),
    "citation": (449_673, 4_685_458, 20.84),
    "email": (57_194, 92_442, 3.23),
    "metabolic": (1_039, 4_741, 9.13),
    "www": (325_729, 1_090_108, 6.69),
    "air-china": (949, 10_757, 22.67),
    "london-tube": (301, 358, 2.38),
}


def dataset_path(name: str) -> Path:
    name = name.lower()
    if name == "karate":
        return Path(str(resources.files("dpprlink") / "data" / "karate.edges"))
    root = os.environ.get(DATA_ENV)
    if root:
        for ext in (".edges", ".txt", ".edgelist"):
            p = Path(root) / f"{name}{ext}"
            if p.exists():
                return p
    raise FileNotFoundError(
        f"no edgelist for dataset {name!r}; put {name}.edges under ${DATA_ENV}"
    )


def load_dataset(name: str) -> Graph:
    return parse_edgelist(dataset_path(name))


def stats(g: Graph) -> tuple:
    return g.n, g.m, round(g.average_degree, 2)
