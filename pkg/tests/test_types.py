#
# Copyright © 2025 Agora
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0, with certain conditions.
# Refer to the "LICENSE" file in the root directory for more information.
#

import json

import pytest

from tree_forcing import (
    BlockTree,
    BoxGraph,
    ClopenSet,
    E0Relation,
    G0Graph,
    MalformedInputError,
    Point,
    PreconditionError,
    PullbackGraph,
    parse_block_tree,
    parse_clopen,
    parse_graph_spec,
)
from tree_forcing.types import graph_spec_to_json


def test_named_graphs():
    assert isinstance(parse_graph_spec('{"kind": "g0"}'), G0Graph)
    assert isinstance(parse_graph_spec({"kind": "e0"}), E0Relation)


def test_box_graph_spec():
    G = parse_graph_spec(
        json.dumps({"kind": "boxes", "depth": 2, "boxes": [["11", "00"]]})
    )
    assert isinstance(G, BoxGraph)
    assert G.words_adjacent("00", "11")
    assert graph_spec_to_json(G) == {"kind": "boxes", "depth": 2, "boxes": [["00", "11"]]}


def test_nested_pullback_spec():
    data = {
        "kind": "pullback",
        "map": {"kind": "prefix", "prefix": "0"},
        "graph": {
            "kind": "pullback",
            "map": {"kind": "xor", "shift": "1"},
            "graph": {"kind": "boxes", "depth": 2, "boxes": [["00", "11"]]},
        },
    }
    G = parse_graph_spec(data)
    assert isinstance(G, PullbackGraph)
    assert G.resolution() == 1
    assert graph_spec_to_json(G) == data


def test_branch_map_spec():
    G = parse_graph_spec(
        {
            "kind": "pullback",
            "map": {"kind": "branch", "tree": {"stem": "1"}},
            "graph": {"kind": "g1"},
        }
    )
    assert G.edge(Point(), Point(prefix="1"))
    assert G.f.apply_point(Point()) == Point(prefix="1")


def test_constant_pullback_is_rejected():
    with pytest.raises(PreconditionError):
        parse_graph_spec(
            {
                "kind": "pullback",
                "map": {"kind": "constant", "point": {"prefix": "1", "period": "0"}},
                "graph": {"kind": "g1"},
            }
        )


@pytest.mark.parametrize(
    "data",
    [
        '{"kind": "g3"}',
        '{"kind": "boxes", "depth": 1, "boxes": [["0", "0"]]}',
        '{"kind": "boxes", "depth": 2, "boxes": [["0", "11"]]}',
        '{"kind": "pullback", "graph": {"kind": "g1"}}',
    ],
)
def test_invalid_graph_specs(data):
    with pytest.raises(ValueError):
        parse_graph_spec(data)


def test_malformed_json():
    with pytest.raises(MalformedInputError):
        parse_graph_spec("{not json")
    with pytest.raises(MalformedInputError):
        parse_block_tree("[1, 2]")


def test_parse_block_tree():
    tree = parse_block_tree(
        '{"stem": "1", "tail": {"kind": "cycle", "blocks": [["01", "11"]]}}'
    )
    assert tree.is_silver()
    assert tree.split_coordinates(5) == [1, 3, 5]
    assert parse_block_tree(tree.model_dump_json()) == tree
    assert parse_block_tree("{}") == BlockTree.full()


def test_parse_clopen():
    A = parse_clopen('{"depth": 2, "words": ["11", "10"]}')
    assert A == ClopenSet.cylinder("1").refine(2)
    with pytest.raises(ValueError):
        parse_clopen('{"depth": 2, "words": ["1"]}')
