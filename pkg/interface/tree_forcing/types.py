#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import json
from typing import Annotated, Any, TypeAlias, Union

from pydantic import BaseModel, Field, TypeAdapter
from typing_extensions import Literal

from .cantor_core import ClopenSet, Point, Word
from .graphs import (
    BoxGraph,
    BranchMap,
    ClopenGraph,
    ConstantMap,
    E0Relation,
    G0Graph,
    G1Graph,
    GraphSpec,
    IdentityMap,
    PrefixMap,
    WordMap,
    XorMap,
    pullback,
)
from .message import MalformedInputError
from .tree_algebra import BlockTree


class IdentityMapParam(BaseModel):
    kind: Literal["identity"] = "identity"


class PrefixMapParam(BaseModel):
    kind: Literal["prefix"] = "prefix"
    prefix: Word = ""


class XorMapParam(BaseModel):
    kind: Literal["xor"] = "xor"
    shift: Word = ""


class ConstantMapParam(BaseModel):
    kind: Literal["constant"] = "constant"
    point: Point = Point()
    """The image of every point. Constant maps are never injective."""


class BranchMapParam(BaseModel):
    kind: Literal["branch"] = "branch"
    tree: BlockTree = BlockTree()


WordMapParam: TypeAlias = Annotated[
    Union[
        IdentityMapParam,
        PrefixMapParam,
        XorMapParam,
        ConstantMapParam,
        BranchMapParam,
    ],
    Field(discriminator="kind"),
]


class NamedGraphParam(BaseModel):
    kind: Literal["g0", "g1", "e0"]


class BoxGraphParam(BaseModel):
    kind: Literal["boxes"] = "boxes"
    depth: int = 0
    boxes: list[tuple[Word, Word]] = []


class PullbackGraphParam(BaseModel):
    kind: Literal["pullback"] = "pullback"
    map: WordMapParam
    graph: "GraphParam"


GraphParam: TypeAlias = Annotated[
    Union[NamedGraphParam, BoxGraphParam, PullbackGraphParam],
    Field(discriminator="kind"),
]

PullbackGraphParam.model_rebuild()

_graph_adapter = TypeAdapter(GraphParam)


def _loads(data: Union[str, bytes, dict[str, Any]]) -> dict[str, Any]:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise MalformedInputError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise MalformedInputError("expected a JSON object")
    return data


def build_word_map(param: WordMapParam) -> WordMap:
    match param.kind:
        case "identity":
            return IdentityMap()
        case "prefix":
            return PrefixMap(param.prefix)
        case "xor":
            return XorMap(param.shift)
        case "constant":
            return ConstantMap(param.point)
        case "branch":
            return BranchMap(param.tree)
    raise MalformedInputError(f"unknown map kind {param.kind!r}")


def build_graph(param: GraphParam) -> GraphSpec:
    match param.kind:
        case "g0":
            return G0Graph()
        case "g1":
            return G1Graph()
        case "e0":
            return E0Relation()
        case "boxes":
            return BoxGraph(ClopenGraph(depth=param.depth, boxes=param.boxes))
        case "pullback":
            return pullback(build_word_map(param.map), build_graph(param.graph))
    raise MalformedInputError(f"unknown graph kind {param.kind!r}")


def parse_graph_spec(data: Union[str, bytes, dict[str, Any]]) -> GraphSpec:
    """Parse a GraphSpec from its JSON object, dispatching on "kind"."""
    return build_graph(_graph_adapter.validate_python(_loads(data)))


def graph_spec_to_json(G: Union[GraphSpec, ClopenGraph]) -> dict[str, Any]:
    if isinstance(G, ClopenGraph):
        G = BoxGraph(G)
    return G.to_json()


def parse_block_tree(data: Union[str, bytes, dict[str, Any]]) -> BlockTree:
    return BlockTree.model_validate(_loads(data))


def parse_clopen(data: Union[str, bytes, dict[str, Any]]) -> ClopenSet:
    return ClopenSet.model_validate(_loads(data))
