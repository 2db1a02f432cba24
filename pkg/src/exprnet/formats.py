"""CSV matrices in, DOT / JSON networks and error tables out."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from .core import Edge, ErrorReport, ExpressionMatrix, GeneId, Network, validate_matrix
from .errors import EmptyInput, ParseError, ValidationError

Source = Union[str, os.PathLike, IO[str], IO[bytes]]


@dataclass(frozen=True)
class CsvSpec:
    delimiter: str = ","
    has_sample_id_column: bool = True

    def __post_init__(self):
        if len(self.delimiter.encode("utf-8")) != 1 or self.delimiter == "." or self.delimiter.isdigit():
            raise ValueError(f"invalid delimiter {self.delimiter!r}")


def _read_text(source: Source) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.lstrip("\ufeff")


def load_matrix(source: Source, spec: CsvSpec = CsvSpec()) -> ExpressionMatrix:
    """Parse a samples-as-rows CSV with a gene-name header.

    Raises ParseError with 1-based (row, column) file coordinates, and
    ValidationError carrying the first finding of :func:`validate_matrix`.
    """
    text = _read_text(source)
    rows = [r for r in csv.reader(io.StringIO(text, newline=""), delimiter=spec.delimiter)]
    # trailing blank lines are not samples
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise EmptyInput("no header row")
    header = [h.strip() for h in rows[0]]
    first = 1 if spec.has_sample_id_column else 0
    names = header[first:]
    width = len(header)
    values, sample_ids = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ParseError(f"expected {width} fields, found {len(row)}", row=r)
        sample_ids.append(row[0].strip() if first else f"s{r - 1}")
        parsed = []
        for c, cell in enumerate(row[first:], start=first + 1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", row=r, col=c) from None
        values.append(parsed)
    arr = np.array(values, dtype=float).reshape(len(values), len(names))
    matrix = ExpressionMatrix.from_array(arr, names, sample_ids)
    findings = validate_matrix(matrix)
    if findings:
        raise ValidationError(findings[0])
    return matrix


def write_matrix(matrix: ExpressionMatrix, target: Union[str, os.PathLike, IO[str], None] = None,
                 spec: CsvSpec = CsvSpec()) -> str:
    """Render a matrix as CSV with round-trippable numbers; also writes it if a target is given."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=spec.delimiter, lineterminator="\n")
    lead = ["sample"] if spec.has_sample_id_column else []
    w.writerow(lead + [g.name for g in matrix.gene_ids])
    for sid, row in zip(matrix.sample_ids, matrix.values):
        w.writerow(([sid] if spec.has_sample_id_column else []) + [repr(float(v)) for v in row])
    text = buf.getvalue()
    _emit(text, target)
    return text


def _emit(text: str, target):
    if target is None:
        return
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        target.write(text)


_DOT_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _dot_id(name: str) -> str:
    if _DOT_ID.match(name) and name.lower() not in ("node", "edge", "graph", "digraph", "subgraph", "strict"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _sig6(x: float) -> str:
    return f"{x:#.6g}"


def penwidth(weight: float) -> float:
    return 1 + 4 * min(1.0, abs(weight))


def export_dot(network: Network) -> str:
    directed = network.kind != "coexpression"
    arrow = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {network.kind} {{"]
    for g in sorted(network.nodes):
        lines.append(f"  {_dot_id(g.name)};")
    for e in network.sorted_edges():
        lines.append(
            f'  {_dot_id(e.source.name)} {arrow} {_dot_id(e.target.name)} '
            f'[weight="{_sig6(e.weight)}", penwidth={penwidth(e.weight):.6g}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_network_json(network: Network) -> str:
    doc = {
        "kind": network.kind,
        "nodes": [g.name for g in sorted(network.nodes)],
        "edges": [
            {"source": e.source.name, "target": e.target.name, "weight": e.weight, "directed": e.directed}
            for e in network.sorted_edges()
        ],
    }
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def import_network_json(text: str) -> Network:
    """Inverse of :func:`export_network_json`; node indices follow list order."""
    doc = json.loads(text)
    nodes = [GeneId(i, name) for i, name in enumerate(doc["nodes"])]
    by_name = {g.name: g for g in nodes}
    if len(by_name) != len(nodes):
        raise ValueError("duplicate node names")
    edges = []
    for e in doc["edges"]:
        try:
            src, dst = by_name[e["source"]], by_name[e["target"]]
        except KeyError as exc:
            raise ValueError(f"edge references unknown node {exc.args[0]!r}") from None
        edges.append(Edge(src, dst, float(e["weight"]), bool(e["directed"])))
    return Network(doc["kind"], nodes, edges)


def _fmt_error(x: float) -> str:
    if not math.isfinite(x):
        return str(x)
    return f"{x:.6g}"


def render_error_report(report: ErrorReport, fmt: str = "csv") -> str:
    header = [report.label_header] + list(report.datasets)
    body = [[label] + [_fmt_error(errs[d]) for d in report.datasets] for label, errs in report.rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    if fmt == "markdown":
        def line(cells):
            return "| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |"
        out = [line(header), "|" + "|".join(["---"] + ["---:"] * len(report.datasets)) + "|"]
        out.extend(line(r) for r in body)
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
