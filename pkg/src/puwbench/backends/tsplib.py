"""Reader for the small TSPLIB subset the TSP backend needs.

Supported keywords: NAME, TYPE (TSP only), COMMENT, DIMENSION,
EDGE_WEIGHT_TYPE (EUC_2D only), NODE_COORD_SECTION and EOF.  EUC_2D files
load in rounded-distance mode, which is the TSPLIB ``nint`` convention.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import TsplibError
from .tsp import DistanceMode, TspInstance, TspTour


def parse_tsplib(text: str, mode: DistanceMode = DistanceMode.EUC_2D_ROUNDED) -> TspInstance:
    header = {}
    coords = {}
    in_coords = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) != 3:
                raise TsplibError(f"line {lineno}: expected 'index x y'")
            try:
                idx, x, y = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError:
                raise TsplibError(f"line {lineno}: bad node coordinate") from None
            if idx in coords:
                raise TsplibError(f"line {lineno}: duplicate node {idx}")
            coords[idx] = (x, y)
            continue
        if line.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise TsplibError(f"line {lineno}: expected 'KEY: value'")
        key, value = key.strip().upper(), value.strip()
        if key not in ("NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE"):
            raise TsplibError(f"line {lineno}: unsupported keyword {key}")
        if key == "TYPE" and value != "TSP":
            raise TsplibError(f"line {lineno}: only TYPE: TSP is supported")
        if key == "EDGE_WEIGHT_TYPE" and value != "EUC_2D":
            raise TsplibError(f"line {lineno}: only EDGE_WEIGHT_TYPE: EUC_2D is supported")
        header[key] = value
    if "DIMENSION" not in header:
        raise TsplibError("missing DIMENSION")
    try:
        n = int(header["DIMENSION"])
    except ValueError:
        raise TsplibError("DIMENSION must be an integer") from None
    if sorted(coords) != list(range(1, n + 1)):
        raise TsplibError(f"NODE_COORD_SECTION must list nodes 1..{n}, found {len(coords)}")
    arr = np.array([coords[i] for i in range(1, n + 1)], dtype=np.float64)
    return TspInstance(arr, mode, header.get("NAME", ""))


def read_tsplib(path, mode: DistanceMode = DistanceMode.EUC_2D_ROUNDED) -> TspInstance:
    return parse_tsplib(Path(path).read_text(), mode)


def format_tsplib(instance: TspInstance, name: str | None = None) -> str:
    lines = [
        f"NAME: {name or instance.name or 'instance'}",
        "TYPE: TSP",
        f"DIMENSION: {instance.n}",
        "EDGE_WEIGHT_TYPE: EUC_2D",
        "NODE_COORD_SECTION",
    ]
    lines += [f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(instance.coords.tolist(), start=1)]
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load_bundled(name: str = "berlin52") -> TspInstance:
    text = resources.files("puwbench.data").joinpath(f"{name}.tsp").read_text()
    return parse_tsplib(text)


def bundled_optimal_tour(name: str = "berlin52") -> TspTour:
    """Known optimal tour shipped with a bundled instance (0-based)."""
    text = resources.files("puwbench.data").joinpath(f"{name}.opt.txt").read_text()
    return TspTour(tuple(int(i) - 1 for i in text.split()))
