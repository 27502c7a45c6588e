#
# Copyright © 2025 Agora
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0, with certain conditions.
# Refer to the "LICENSE" file in the root directory for more information.
#

import itertools
import json

import pytest

from tree_forcing import BlockTree, ClopenGraph, four_cycle
from tree_forcing.cantor_core import words_of_length
from tree_forcing.cli import build_parser, main
from tree_forcing.const import EXIT_BUDGET_EXCEEDED
from tree_forcing.message import ErrorCode


@pytest.fixture
def diagonal_file(tmp_path):
    path = tmp_path / "diagonal.json"
    path.write_text(json.dumps({"kind": "boxes", "depth": 2, "boxes": [["00", "11"]]}))
    return str(path)


@pytest.fixture
def non_fat_file(tmp_path):
    path = tmp_path / "tree.json"
    path.write_text(
        json.dumps({"stem": "1", "tail": {"kind": "cycle", "blocks": [["01", "11"]]}})
    )
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ============================================================================
# chromatic
# ============================================================================


def test_chromatic_json(capsys):
    code, out, _ = run(capsys, "chromatic", "--graph", "g1", "--depth", "3")
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "chromatic"
    assert report["summary"] == {
        "chromatic_number": 2,
        "depth": 3,
        "edges": 12,
        "vertices": 8,
    }


def test_chromatic_text_and_dot(capsys):
    code, out, _ = run(
        capsys, "chromatic", "--graph", "g0", "--depth", "3", "--format", "text"
    )
    assert code == 0
    assert "chromatic_number: 2" in out
    assert "edges: 7" in out
    code, out, _ = run(
        capsys, "chromatic", "--graph", "g0", "--depth", "2", "--format", "dot"
    )
    assert out.startswith("graph restriction_2 {")


def test_chromatic_depth_guard(capsys):
    code, _, err = run(capsys, "chromatic", "--graph", "g0", "--depth", "20")
    assert code == 1
    assert json.loads(err)["kind"] == "PreconditionError"


def test_invalid_options(capsys, tmp_path):
    code, _, err = run(capsys, "chromatic", "--graph", "g1", "--budget", "0")
    assert code == 1
    code, _, err = run(capsys, "chromatic", "--graph", str(tmp_path / "missing.json"))
    assert code == 1
    assert json.loads(err)["kind"] == "FileNotFoundError"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "chromatic", "--graph", str(bad))
    assert code == 1
    assert json.loads(err)["kind"] == "MalformedInputError"


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["colour"])


# ============================================================================
# construct
# ============================================================================


def test_construct_independent_tree(capsys, diagonal_file):
    code, out, _ = run(
        capsys, "construct", "independent-tree", "--graph", diagonal_file, "--depth", "6"
    )
    assert code == 0
    report = json.loads(out)
    assert report["summary"] == {"stem": "", "silver": True}
    assert report["result"]["blocks"] == [["00", "10"]]


def test_construct_dichotomy_undecided(capsys, diagonal_file):
    code, out, _ = run(
        capsys, "construct", "dichotomy", "--graph", diagonal_file, "--budget", "2"
    )
    assert code == 3
    assert json.loads(out)["summary"] == {"outcome": "undecided"}


def test_construct_dichotomy_independent(capsys, diagonal_file):
    code, out, _ = run(capsys, "construct", "dichotomy", "--graph", diagonal_file)
    assert code == 0
    assert json.loads(out)["result"]["kind"] == "independent"


def test_construct_four_cycle(capsys, tmp_path):
    path = tmp_path / "complete.json"
    path.write_text(json.dumps({"kind": "boxes", "depth": 1, "boxes": [["0", "1"]]}))
    code, out, _ = run(
        capsys, "construct", "four-cycle", "--graph", str(path), "--format", "dot"
    )
    assert code == 0
    assert out.count(" -- ") == 4


def test_construct_four_cycle_with_a_seed(capsys, tmp_path):
    left = ["0" + w for w in words_of_length(5)]
    boxes = [("0" + w, "1" + w) for w in words_of_length(5)]
    G = ClopenGraph(depth=6, boxes=boxes + list(itertools.combinations(left, 2)))
    path = tmp_path / "left.json"
    path.write_text(json.dumps({"kind": "boxes", **G.model_dump(mode="json")}))
    code, out, _ = run(capsys, "construct", "four-cycle", "--graph", str(path), "--seed", "3")
    assert code == 0
    summary = json.loads(out)["summary"]
    expected = four_cycle(BlockTree.full(), G, seed=3)
    assert summary == {"phase": "ramsey", "points": [str(z) for z in expected.points]}
    _, unseeded, _ = run(capsys, "construct", "four-cycle", "--graph", str(path))
    assert json.loads(unseeded)["summary"] != summary


def test_construct_four_cycle_on_an_edgeless_graph(capsys, tmp_path):
    path = tmp_path / "edgeless.json"
    path.write_text(json.dumps({"kind": "boxes", "depth": 1, "boxes": []}))
    code, _, err = run(capsys, "construct", "four-cycle", "--graph", str(path))
    assert code == 1
    assert json.loads(err)["kind"] == "PreconditionError"


# ============================================================================
# fat
# ============================================================================


def test_fat_check(capsys, non_fat_file):
    code, out, _ = run(capsys, "fat", "check")
    assert code == 0
    assert json.loads(out)["summary"]["fat"] is True
    code, out, _ = run(capsys, "fat", "check", "--tree", non_fat_file)
    assert code == 3
    assert json.loads(out)["summary"]["fat"] is False


def test_fat_ladder(capsys):
    code, out, _ = run(capsys, "fat", "ladder", "--levels", "3", "--format", "text")
    assert code == 0
    assert "sizes: [1, 2, 8, 2048]" in out
    assert "growth_law: True" in out


def test_fat_ladder_budget(capsys):
    code, _, err = run(capsys, "fat", "ladder", "--levels", "3", "--budget", "10")
    assert code == EXIT_BUDGET_EXCEEDED == ErrorCode.BUDGET
    assert json.loads(err)["metadata"]["level"] == 3


def test_fat_ladder_missing_witness(capsys, non_fat_file):
    code, _, err = run(capsys, "fat", "ladder", "--levels", "1", "--tree", non_fat_file)
    assert code == 3
    assert json.loads(err)["kind"] == "FatnessMissingError"


CYLINDER_SPLITS = [2, 3, 5, *range(24, 32), 33, 35, 37, 39, 41, 43, 45]


def test_fat_build_writes_output(capsys, tmp_path):
    clopen = tmp_path / "cylinder.json"
    clopen.write_text(json.dumps({"depth": 1, "words": ["1"]}))
    out_path = tmp_path / "reports" / "tree.json"
    code, out, _ = run(
        capsys, "fat", "build", "--clopen", str(clopen), "--out", str(out_path)
    )
    assert code == 0
    assert out == ""
    report = json.loads(out_path.read_text(encoding="utf-8"))
    assert report["summary"] == {"stem": "10", "splits": CYLINDER_SPLITS}
