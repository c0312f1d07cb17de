"""
Snapshot text format
File: src/twoscale/process/snapshots.py

d = 2: header `TSCP v1 w=<W> h=<H> t=<time> seed=<seed> config=<hash>` then H
rows of W characters from {., 1, 2}; row index is the second coordinate.
Other d: header `TSCPND v1 d=<d> side=<S> t=<time> seed=<seed> config=<hash>`
then one `x1 ... xd state` line per vertex.
"""
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from twoscale.lattice.graph import TwoScaleGraph

_CHARS = np.array([".", "1", "2"])


def format_time(t: float) -> str:
    return f"{t:.10g}"


def snapshot_text(
    graph: TwoScaleGraph, states: np.ndarray, t: float, seed: int, config_hash: str = ""
) -> str:
    """Render a configuration in the snapshot format"""
    states = np.asarray(states, dtype=np.int64)
    tag = f"t={format_time(t)} seed={seed} config={config_hash}"
    if graph.spec.d == 2:
        side = graph.spec.side
        rows = graph.grid(states).T
        lines = [f"TSCP v1 w={side} h={side} {tag}"]
        lines += ["".join(_CHARS[row]) for row in rows]
    else:
        lines = [f"TSCPND v1 d={graph.spec.d} side={graph.spec.side} {tag}"]
        for coords, s in zip(graph.coords, states):
            lines.append(" ".join(str(int(c)) for c in coords) + f" {int(s)}")
    return "\n".join(lines) + "\n"


def write_snapshot(
    path: Path, graph: TwoScaleGraph, states: np.ndarray, t: float, seed: int, config_hash: str = ""
) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(snapshot_text(graph, states, t, seed, config_hash))
    return path


def _header_fields(header: str) -> Dict[str, str]:
    fields = {}
    for token in header.split()[2:]:
        key, _, value = token.partition("=")
        fields[key] = value
    return fields


def read_snapshot(path: Union[str, Path]) -> Tuple[np.ndarray, Dict[str, str]]:
    """Parse a snapshot file into (row-major state vector, header fields)"""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"empty snapshot file {path}")
    header = lines[0]
    fields = _header_fields(header)
    if header.startswith("TSCP v1"):
        w, h = int(fields["w"]), int(fields["h"])
        rows = lines[1 : 1 + h]
        if len(rows) != h or any(len(r) != w for r in rows):
            raise ValueError(f"snapshot {path} does not match its {w}x{h} header")
        lookup = {".": 0, "1": 1, "2": 2}
        grid = np.array([[lookup[c] for c in row] for row in rows], dtype=np.int8)
        return grid.T.reshape(-1), fields
    if header.startswith("TSCPND v1"):
        d, side = int(fields["d"]), int(fields["side"])
        states = np.zeros(side**d, dtype=np.int8)
        for line in lines[1:]:
            parts = [int(p) for p in line.split()]
            index = np.ravel_multi_index(tuple(parts[:d]), (side,) * d)
            states[index] = parts[d]
        return states, fields
    raise ValueError(f"unrecognized snapshot header in {path}: {header[:40]!r}")
