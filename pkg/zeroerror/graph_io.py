"""
JSON file formats for graphs and joint sources
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .errors import GraphFormatError, GraphValidationError
from .graph_core import ProbabilisticGraph, VertexId


class VertexRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: Union[int, str]
    p: float


class GraphFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: List[VertexRecord]
    edges: List[List[Union[int, str]]] = []

    @field_validator("edges")
    @classmethod
    def edges_are_pairs(cls, edges: List[List[Union[int, str]]]) -> List[List[Union[int, str]]]:
        for k, edge in enumerate(edges):
            if len(edge) != 2:
                raise ValueError(f"edge {k} has {len(edge)} endpoints, expected 2")
        return edges


class SourceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: List[Union[str, int]]
    y: List[Union[str, int]]
    joint: List[List[float]]
    g: Optional[Dict[str, Union[str, int]]] = None


def vertex_label(v: VertexId) -> str:
    """Tuple ids render as (a,b) with nested tuples flattened the same way"""
    if isinstance(v, tuple):
        return "(" + ",".join(vertex_label(x) for x in v) + ")"
    return str(v)


def _format_error(e: ValidationError, path: Optional[str]) -> GraphFormatError:
    first = e.errors()[0]
    field = ".".join(str(part) for part in first.get("loc", ()))
    return GraphFormatError(first.get("msg", "invalid value"), path=path, field=field or None)


def _load_json(text: str, path: Optional[str]) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(e.msg, path=path, line=e.lineno, column=e.colno) from e


def graph_from_json(data: Any, path: Optional[str] = None) -> ProbabilisticGraph:
    try:
        model = GraphFile.model_validate(data)
    except ValidationError as e:
        raise _format_error(e, path) from e
    try:
        return ProbabilisticGraph(
            [v.id for v in model.vertices],
            [tuple(edge) for edge in model.edges],
            [v.p for v in model.vertices],
        )
    except GraphValidationError as e:
        raise GraphFormatError(str(e), path=path) from e


def graph_to_json(g: ProbabilisticGraph) -> Dict[str, Any]:
    """
    Vertices in graph (canonical) order. Edges are listed once each as
    [u, v] with u before v, sorted lexicographically by the canonical
    positions of their endpoints. Integer ids are written as JSON numbers so
    files round-trip to the same ids; every other id is written as its
    vertex_label string.
    """
    labels = [v if isinstance(v, int) and not isinstance(v, bool) else vertex_label(v) for v in g.vertices]
    if len({str(label) for label in labels}) != len(labels):
        raise GraphValidationError("vertex ids collide once rendered as strings")
    return {
        "vertices": [{"id": label, "p": p} for label, p in zip(labels, g.weights)],
        "edges": [[labels[i], labels[j]] for i, j in g.edge_indices()],
    }


def read_graph(path: Union[str, Path]) -> ProbabilisticGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise GraphFormatError(f"cannot read file: {e.strerror}", path=str(path)) from e
    g = graph_from_json(_load_json(text, str(path)), str(path))
    logging.debug(f"Loaded graph from {path}: {g.n} vertices, {g.edge_count()} edges")
    return g


def write_graph(g: ProbabilisticGraph, path: Union[str, Path]) -> None:
    path = Path(path)
    path.write_text(json.dumps(graph_to_json(g), indent=2) + "\n", encoding="utf-8")
    logging.info(f"Graph written to {path}")


def source_from_json(data: Any, path: Optional[str] = None):
    from .coding import JointSource

    try:
        model = SourceFile.model_validate(data)
    except ValidationError as e:
        raise _format_error(e, path) from e
    x = [str(s) for s in model.x]
    y = [str(s) for s in model.y]
    g_map = None
    if model.g is not None:
        g_map = {str(k): str(v) for k, v in model.g.items()}
    try:
        return JointSource(x, y, model.joint, g_map)
    except GraphValidationError as e:
        raise GraphFormatError(str(e), path=path) from e


def read_source(path: Union[str, Path]):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise GraphFormatError(f"cannot read file: {e.strerror}", path=str(path)) from e
    return source_from_json(_load_json(text, str(path)), str(path))
