"""JSON instance files and result reports.

Rationals always travel as ``"p/q"`` strings. An instance file looks like::

    {
      "n": 3,
      "matrix": [[0, 10, 10], [10, 0, 10], [10, 10, 0]],
      "topology": {"kind": "general", "edges": [[1, 2], [1, 3], [2, 3]]},
      "fees": ["1/1", "1/1", "1/1"]
    }

``topology`` and ``fees`` are optional; ``fees`` is aligned with
``topology.edges``. For ``kind: "star"`` the hub is vertex ``n + 1``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .core import ChannelGraph, Edge, MatrixError, TransactionMatrix, validate_matrix
from .tree_opt import NotATreeError, check_tree

KINDS = ("path", "tree", "star", "general")
_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


class InstanceParseError(ValueError):
    """Malformed file; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str, field: str = "fee") -> Fraction:
    if not isinstance(text, str):
        raise InstanceParseError(field, f"expected a 'p/q' string, got {text!r}")
    match = _RATIONAL.match(text)
    if not match or match.group(2) == "0":
        raise InstanceParseError(field, f"cannot parse rational {text!r}")
    return Fraction(int(match.group(1)), int(match.group(2) or 1))


@dataclass(frozen=True)
class Topology:
    kind: str
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class InstanceFile:
    matrix: TransactionMatrix
    topology: Topology | None = None
    fees: tuple[Fraction, ...] | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def vertex_count(self) -> int:
        if self.topology is not None and self.topology.kind == "star":
            return self.n + 1
        return self.n

    def graph(self, fees=None) -> ChannelGraph:
        if self.topology is None:
            raise InstanceParseError("topology", "missing")
        fees = self.fees if fees is None else fees
        if fees is None:
            raise InstanceParseError("fees", "missing")
        return ChannelGraph(self.vertex_count, dict(zip(self.topology.edges, fees)))

    def evaluation_matrix(self) -> TransactionMatrix:
        return self.matrix.padded(self.vertex_count)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"n": self.n, "matrix": self.matrix.tolist()}
        if self.topology is not None:
            out["topology"] = {"kind": self.topology.kind, "edges": [list(e) for e in self.topology.edges]}
        if self.fees is not None:
            out["fees"] = [format_rational(f) for f in self.fees]
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def default_path_edges(n: int) -> tuple[Edge, ...]:
    return tuple((k, k + 1) for k in range(1, n))


def _check_topology(n: int, kind: str, edges: tuple[Edge, ...]) -> None:
    vcount = n + 1 if kind == "star" else n
    for u, v in edges:
        if u == v or not (1 <= u <= vcount and 1 <= v <= vcount):
            raise InstanceParseError("topology.edges", f"bad edge [{u}, {v}]")
    if len({(min(e), max(e)) for e in edges}) != len(edges):
        raise InstanceParseError("topology.edges", "duplicate edge")
    if kind == "path":
        if tuple((min(e), max(e)) for e in edges) != default_path_edges(n):
            raise InstanceParseError("topology.edges", "path edges must be [k, k+1] for k = 1..n-1 in order")
    elif kind == "tree":
        try:
            check_tree(n, edges)
        except NotATreeError as exc:
            raise InstanceParseError("topology.edges", str(exc)) from None
    elif kind == "star":
        hub = n + 1
        if sorted((min(e), max(e)) for e in edges) != [(i, hub) for i in range(1, n + 1)]:
            raise InstanceParseError("topology.edges", f"star edges must be [i, {hub}] for i = 1..{n}")


def instance_from_dict(data: Any) -> InstanceFile:
    if not isinstance(data, dict):
        raise InstanceParseError("<root>", "expected a JSON object")
    if "instance" in data and "matrix" not in data:
        data = data["instance"]
        if not isinstance(data, dict):
            raise InstanceParseError("instance", "expected a JSON object")
    if "matrix" not in data:
        raise InstanceParseError("matrix", "missing")
    raw = data["matrix"]
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise InstanceParseError("matrix", "expected a list of rows")
    for row in raw:
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in row):
            raise InstanceParseError("matrix", "entries must be integers")
    try:
        t = validate_matrix(raw)
    except MatrixError as exc:
        raise InstanceParseError("matrix", str(exc)) from None
    if "n" in data and data["n"] != t.n:
        raise InstanceParseError("n", f"n={data['n']} but matrix is {t.n}x{t.n}")
    topo = None
    if "topology" in data:
        raw_topo = data["topology"]
        if not isinstance(raw_topo, dict):
            raise InstanceParseError("topology", "expected an object")
        kind = raw_topo.get("kind")
        if kind not in KINDS:
            raise InstanceParseError("topology.kind", f"expected one of {KINDS}, got {kind!r}")
        raw_edges = raw_topo.get("edges")
        if raw_edges is None and kind == "path":
            raw_edges = [list(e) for e in default_path_edges(t.n)]
        if not isinstance(raw_edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e) for e in raw_edges
        ):
            raise InstanceParseError("topology.edges", "expected a list of [u, v] integer pairs")
        edges = tuple((e[0], e[1]) for e in raw_edges)
        _check_topology(t.n, kind, edges)
        topo = Topology(kind, edges)
    fees = None
    if "fees" in data:
        if topo is None:
            raise InstanceParseError("fees", "fees given without topology")
        raw_fees = data["fees"]
        if not isinstance(raw_fees, list) or len(raw_fees) != len(topo.edges):
            raise InstanceParseError("fees", f"expected {len(topo.edges)} 'p/q' strings")
        fees = tuple(parse_rational(f, f"fees[{k}]") for k, f in enumerate(raw_fees))
        for k, f in enumerate(fees):
            if not 0 <= f <= 1:
                raise InstanceParseError(f"fees[{k}]", f"fee {f} outside [0, 1]")
    seed = data.get("seed")
    return InstanceFile(t, topo, fees, seed)


def dumps(obj: dict[str, Any]) -> str:
    return json.dumps(obj, indent=2) + "\n"


def serialize_instance(inst: InstanceFile) -> str:
    return dumps(inst.to_dict())


def parse_instance(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError("<json>", str(exc)) from None
    return instance_from_dict(data)


def instance_digest(inst: InstanceFile) -> str:
    canonical = json.dumps(inst.to_dict(), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()


def decisions_to_json(report) -> list[dict[str, Any]]:
    return [
        {
            "pair": list(d.pair),
            "demand": d.demand,
            "served": d.served,
            "path": [list(e) for e in d.path],
            "path_cost": None if d.path_cost is None else format_rational(d.path_cost),
        }
        for d in report.decisions
    ]


def generate_instance(
    n: int,
    density: float,
    max_demand: int,
    seed: int,
    kind: str | None = None,
) -> InstanceFile:
    """Seeded random instance; ``density`` is the chance a pair has demand."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 <= density <= 1:
        raise ValueError("density must be in [0, 1]")
    if max_demand < 1:
        raise ValueError("max_demand must be >= 1")
    rng = np.random.default_rng(seed)
    grid = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            active = rng.random() < density
            value = int(rng.integers(1, max_demand + 1))
            if active:
                grid[i][j] = grid[j][i] = value
    t = validate_matrix(grid)
    topo = None
    if kind == "path":
        topo = Topology("path", default_path_edges(n))
    elif kind == "tree":
        topo = Topology("tree", random_tree(n, rng))
    elif kind == "star":
        topo = Topology("star", tuple((i, n + 1) for i in range(1, n + 1)))
    elif kind == "general":
        slots = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        topo = Topology("general", tuple(e for e in slots if rng.random() < 0.5))
    elif kind is not None:
        raise ValueError(f"unknown kind {kind!r}")
    return InstanceFile(t, topo, None, seed)


def random_tree(n: int, rng: np.random.Generator) -> tuple[Edge, ...]:
    """Uniform labeled tree via a random Pruefer sequence."""
    if n == 1:
        return ()
    if n == 2:
        return ((1, 2),)
    seq = [int(x) for x in rng.integers(1, n + 1, size=n - 2)]
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(1, n + 1) if degree[w] == 1]
    edges.append((u, v))
    return tuple(edges)
