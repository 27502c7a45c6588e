#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import logging
import os
import sys

import pytest

sys.path.insert(
    0, os.path.join(os.path.dirname(os.path.dirname(__file__)), "interface")
)

from tree_forcing import BlockTree, ClopenGraph, StdLogger  # noqa: E402


@pytest.fixture
def full_tree() -> BlockTree:
    return BlockTree.full()


@pytest.fixture
def diagonal_graph() -> ClopenGraph:
    """One box joining 00 and 11; every split at the root is refutable."""
    return ClopenGraph(depth=2, boxes=[("00", "11")])


@pytest.fixture
def complete_graph() -> ClopenGraph:
    return ClopenGraph.complete(1)


@pytest.fixture
def non_fat_tree() -> BlockTree:
    """Stem 1, then every even coordinate fixed to 1."""
    return BlockTree(stem="1", tail={"kind": "cycle", "blocks": [("01", "11")]})


@pytest.fixture
def logger(caplog) -> StdLogger:
    caplog.set_level(logging.DEBUG, logger="tree_forcing")
    return StdLogger()
