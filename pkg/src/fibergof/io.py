"""Reading networks and tables, writing fits, traces, histograms and fibers."""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DuplicateEdge, ParseError, SelfLoop
from .netgraph import DirectedGraph


class Network(NamedTuple):
    graph: DirectedGraph
    labels: tuple  # labels[k - 1] is the original label of node k


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


class _Builder:
    def __init__(self):
        self.edges: set = set()

    def add(self, a: int, b: int, lineno: int, label_a=None, label_b=None):
        if a == b:
            raise SelfLoop(f"self-loop on node {label_a if label_a is not None else a}", lineno)
        if (a, b) in self.edges:
            la = label_a if label_a is not None else a
            lb = label_b if label_b is not None else b
            raise DuplicateEdge(f"duplicate edge {la} -> {lb}", lineno)
        self.edges.add((a, b))


def _label_order(tokens: list[str]) -> list[str]:
    """Distinct labels: numeric order if every label is an integer, else order of first appearance."""
    seen = list(dict.fromkeys(tokens))
    if seen and all(re.fullmatch(r"[+-]?\d+", t) for t in seen):
        return sorted(seen, key=int)
    return seen


def parse_edgelist(text: str) -> Network:
    """Whitespace-separated ``tail head`` per line; ``#`` starts a comment.

    A line with a single token declares an isolated node. Extra tokens after
    the first two (weights) are ignored.
    """
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        records.append((lineno, parts[:2]))
    labels = _label_order([t for _, parts in records for t in parts])
    if not labels:
        raise ParseError("no nodes found")
    node = {lab: k for k, lab in enumerate(labels, start=1)}
    b = _Builder()
    for lineno, parts in records:
        if len(parts) == 2:
            b.add(node[parts[0]], node[parts[1]], lineno, parts[0], parts[1])
    return Network(DirectedGraph(len(labels), frozenset(b.edges)), tuple(labels))


_SECTION = re.compile(r"^\*(\w+)", re.IGNORECASE)


def _vertex_index(tok: str, n: int, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"vertex index {tok!r} is not an integer", lineno) from None
    if not 1 <= v <= n:
        raise ParseError(f"vertex {v} outside 1..{n}", lineno)
    return v


def parse_pajek(text: str) -> Network:
    """Pajek subset: ``*Vertices``, ``*Arcs``, ``*Edges``, ``*Arcslist``, ``*Edgeslist``.

    Section names are case-insensitive, ``*Edges`` lines become reciprocated
    pairs and arc weights are ignored.
    """
    n = None
    labels: list = []
    section = None
    b = _Builder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1).lower()
            if section == "vertices":
                try:
                    n = int(line.split()[1])
                except (IndexError, ValueError):
                    raise ParseError("*Vertices needs a vertex count", lineno) from None
                labels = [str(k) for k in range(1, n + 1)]
            elif section not in ("arcs", "edges", "arcslist", "edgeslist"):
                raise ParseError(f"unsupported section *{m.group(1)}", lineno)
            elif n is None:
                raise ParseError(f"*{m.group(1)} before *Vertices", lineno)
            continue
        if section is None:
            raise ParseError("data before any section header", lineno)
        if section == "vertices":
            mm = re.match(r'(\d+)\s+(?:"([^"]*)"|(\S+))', line)
            if mm:
                v = _vertex_index(mm.group(1), n, lineno)
                labels[v - 1] = mm.group(2) if mm.group(2) is not None else mm.group(3)
            continue
        toks = line.split()
        if section in ("arcs", "edges"):
            if len(toks) < 2:
                raise ParseError("expected two vertex indices", lineno)
            pairs = [(toks[0], toks[1])]
        else:
            pairs = [(toks[0], t) for t in toks[1:]]
        for ta, tb in pairs:
            a, c = _vertex_index(ta, n, lineno), _vertex_index(tb, n, lineno)
            b.add(a, c, lineno)
            if section in ("edges", "edgeslist"):
                b.add(c, a, lineno)
    if n is None:
        raise ParseError("missing *Vertices section")
    return Network(DirectedGraph(n, frozenset(b.edges)), tuple(labels))


def detect_format(text: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        return "pajek" if line.lower().startswith("*vertices") else "edgelist"
    return "edgelist"


def parse_network(path, fmt: str = "auto") -> Network:
    text = Path(path).read_text()
    if fmt == "auto":
        fmt = detect_format(text)
    if fmt == "edgelist":
        return parse_edgelist(text)
    if fmt == "pajek":
        return parse_pajek(text)
    raise ValueError(f"unknown network format {fmt!r}")


def format_edgelist(g: DirectedGraph, labels=None) -> str:
    """Edge-list text that parses back to ``g`` (node lines first, then arcs)."""
    labels = list(labels) if labels is not None else [str(k) for k in range(1, g.n + 1)]
    lines = [str(lab) for lab in labels]
    lines += [f"{labels[i - 1]} {labels[j - 1]}" for i, j in g.canonical]
    return "\n".join(lines) + "\n"


def write_edgelist(path, g: DirectedGraph, labels=None):
    Path(path).write_text(format_edgelist(g, labels))


def format_graph_line(g: DirectedGraph) -> str:
    return " ".join(f"{i}>{j}" for i, j in g.canonical)


def parse_graph_line(line: str, n: int) -> DirectedGraph:
    edges = set()
    for tok in line.split():
        a, b = tok.split(">")
        edges.add((int(a), int(b)))
    return DirectedGraph(n, frozenset(edges))


def format_fiber(fiber, n: int) -> str:
    """One graph per line as ``tail>head`` tokens, after a two-line header."""
    out = [f"# nodes: {n}", f"# fiber size: {len(fiber)}"]
    out += [format_graph_line(g) for g in fiber]
    return "\n".join(out) + "\n"


def read_fiber(path) -> list[DirectedGraph]:
    lines = Path(path).read_text().splitlines()
    n = int(lines[0].split(":")[1])
    return [parse_graph_line(line, n) for line in lines[2:]]


def write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


TRACE_HEADER = ("step", "chiSquare", "accepted", "trivial", "runningPValue",
                "runningPValueInclBurnin", "distinctVisited")


def write_trace(path, result):
    write_csv(path, TRACE_HEADER, result.trace_rows)


def histogram_bins(values, bins=None):
    """``(left, right, count)`` rows; Freedman-Diaconis binning unless ``bins`` is given."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return []
    lo, hi = float(v.min()), float(v.max())
    if hi - lo <= 1e-9 * max(1.0, abs(hi)):
        # all values tie up to rounding noise
        return [(lo, hi, int(v.size))]
    counts, edges = np.histogram(v, bins="fd" if bins is None else int(bins))
    return [(float(edges[k]), float(edges[k + 1]), int(c)) for k, c in enumerate(counts)]


def write_histogram(path, values, bins=None):
    write_csv(path, ("binLeft", "binRight", "count"), histogram_bins(values, bins))


def read_table(path) -> np.ndarray:
    """Comma- or whitespace-separated nonnegative integer table."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        try:
            rows.append([int(t) for t in re.split(r"[,\s]+", line) if t])
        except ValueError:
            raise ParseError("table entries must be integers", lineno) from None
        if any(x < 0 for x in rows[-1]):
            raise ParseError("table entries must be nonnegative", lineno)
    if not rows:
        raise ParseError("empty table")
    if len({len(r) for r in rows}) != 1:
        raise ParseError("ragged table rows")
    return np.array(rows, dtype=np.int64)
