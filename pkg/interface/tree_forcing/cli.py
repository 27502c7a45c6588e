#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import argparse
import asyncio
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import BaseModel

from .cantor_core import ClopenSet
from .config import RunConfig
from .const import (
    DEFAULT_DEPTH_OUT,
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_OK,
    FORMAT_DOT,
    FORMAT_TEXT,
    LOG_CATEGORY_KEY_POINT,
    MAX_EXACT_COLORING_DEPTH,
    OUTPUT_FORMATS,
)
from .constructions import (
    Undecided,
    density_dichotomy,
    four_cycle,
    independent_tree,
    perfect_clique,
    verify_independent,
)
from .dumper import dump_text
from .fat_trees import g0_tree_inside, is_fat, ladder
from .graphs import E0Relation, G0Graph, G1Graph, GraphSpec, chromatic_number
from .helper import Logger, StdLogger, TimeHelper
from .message import ErrorReport, PreconditionError, TreeForcingError
from .tree_algebra import BlockTree
from .types import graph_spec_to_json, parse_block_tree, parse_clopen, parse_graph_spec

CONSTRUCT_KINDS = ("independent-tree", "clique-tree", "four-cycle", "dichotomy")
FAT_KINDS = ("check", "build", "ladder")


class CommandResult(BaseModel):
    code: int = EXIT_OK
    summary: dict[str, Any] = {}
    result: Any = None
    transcript: list[str] = []
    dot: Optional[str] = None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="Search budget.")
    common.add_argument("--out", type=str, default=None, help="Write the report here.")
    common.add_argument(
        "--format", type=str, default=None, choices=OUTPUT_FORMATS, help="Report format."
    )
    common.add_argument("--seed", type=int, default=None, help="Generator seed.")
    common.add_argument("--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(
        prog="tree-forcing",
        description="Tree forcing constructions on Cantor space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    chromatic = sub.add_parser(
        "chromatic", parents=[common], help="Exact chromatic number of a restriction."
    )
    chromatic.add_argument("--graph", required=True, help="g0, g1, e0 or a JSON file.")
    chromatic.add_argument("--depth", type=int, default=None)

    construct = sub.add_parser(
        "construct", parents=[common], help="Run a construction below a condition."
    )
    construct.add_argument("kind", choices=CONSTRUCT_KINDS)
    construct.add_argument("--graph", required=True, help="GraphSpec JSON file.")
    construct.add_argument("--tree", default=None, help="BlockTree JSON file.")
    construct.add_argument("--depth", type=int, default=None)
    construct.add_argument("--relation", choices=("g1", "e0"), default=None)

    fat = sub.add_parser("fat", parents=[common], help="G₀-fat Silver trees.")
    fat.add_argument("kind", choices=FAT_KINDS)
    fat.add_argument("--tree", default=None, help="BlockTree JSON file.")
    fat.add_argument("--clopen", default=None, help="ClopenSet JSON file.")
    fat.add_argument("--split-depth", dest="split_depth", type=int, default=None)
    fat.add_argument("--probe-depth", dest="probe_depth", type=int, default=None)
    fat.add_argument("--levels", type=int, default=None)
    fat.add_argument("--depth", type=int, default=None)
    return parser


# ============================================================================
# Inputs
# ============================================================================


def load_graph(name: str) -> GraphSpec:
    match name:
        case "g0":
            return G0Graph()
        case "g1":
            return G1Graph()
        case "e0":
            return E0Relation()
    return parse_graph_spec(Path(name).read_text(encoding="utf-8"))


def load_tree(path: str) -> BlockTree:
    if not path or path == "full":
        return BlockTree.full()
    return parse_block_tree(Path(path).read_text(encoding="utf-8"))


def load_clopen(path: str) -> ClopenSet:
    if not path:
        return ClopenSet.full(0)
    return parse_clopen(Path(path).read_text(encoding="utf-8"))


# ============================================================================
# Commands
# ============================================================================


def cmd_chromatic(config: RunConfig, logger: Logger) -> CommandResult:
    if config.depth > MAX_EXACT_COLORING_DEPTH:
        raise PreconditionError(
            f"exact coloring is limited to depth {MAX_EXACT_COLORING_DEPTH}",
            depth=config.depth,
        )
    G = load_graph(config.graph)
    F = G.restrict(config.depth)
    result = chromatic_number(F, budget=config.budget, logger=logger)
    return CommandResult(
        summary={
            "chromatic_number": result.chromatic_number,
            "depth": config.depth,
            "edges": F.edge_count,
            "vertices": len(F.vertices),
        },
        result={
            "graph": graph_spec_to_json(G),
            "coloring": result.model_dump(mode="json"),
            "is_forest": F.is_forest(),
            "is_connected": F.is_connected() if F.vertices else False,
        },
        transcript=[
            f"restriction to depth {config.depth} has {F.edge_count} edges",
            f"coloring by {result.method} verified proper",
        ],
        dot=F.to_dot(result.coloring),
    )


def cmd_construct(config: RunConfig, logger: Logger) -> CommandResult:
    G = load_graph(config.graph)
    p = load_tree(config.tree)
    depth_out = config.depth or DEFAULT_DEPTH_OUT
    relation = config.relation
    match config.kind:
        case "independent-tree":
            tree = independent_tree(p, G, relation, depth_out=depth_out, logger=logger)
            checked = verify_independent(tree, G, relation, depth_out)
            return CommandResult(
                summary={"stem": tree.stem, "silver": tree.is_silver()},
                result=tree.model_dump(mode="json"),
                transcript=[f"independence re-verified on {checked} related pairs"],
                dot=tree.to_finite(depth_out).to_dot("independent_tree"),
            )
        case "clique-tree":
            evidence = perfect_clique(
                p, G, relation, depth_out, budget=config.budget, logger=logger
            )
            return CommandResult(
                summary={"leaves": len(evidence.tree.leaves), "splits": len(evidence.splits)},
                result=evidence.model_dump(mode="json"),
                transcript=[f"clique verified on {evidence.verified_pairs} leaf pairs"],
                dot=evidence.tree.to_dot("clique_tree"),
            )
        case "four-cycle":
            cycle = four_cycle(p, G, bound=config.budget, seed=config.seed, logger=logger)
            lines = ["graph four_cycle {"]
            for i, z in enumerate(cycle.points):
                lines.append(f'  "{z}" -- "{cycle.points[(i + 1) % 4]}";')
            lines.append("}")
            return CommandResult(
                summary={"phase": cycle.phase, "points": [str(z) for z in cycle.points]},
                result=cycle.model_dump(mode="json"),
                transcript=["4 distinct points with 4 verified edges"],
                dot="\n".join(lines) + "\n",
            )
        case "dichotomy":
            outcome = density_dichotomy(
                p, G, relation, config.budget, depth_out, logger=logger
            )
            dot = None
            if outcome.kind == "independent":
                dot = outcome.tree.to_finite(depth_out).to_dot("independent_tree")
            elif outcome.kind == "clique":
                dot = outcome.tree.to_dot("clique_tree")
            return CommandResult(
                code=EXIT_NEGATIVE if isinstance(outcome, Undecided) else EXIT_OK,
                summary={"outcome": outcome.kind},
                result=outcome.model_dump(mode="json"),
                transcript=[f"dichotomy outcome {outcome.kind}"],
                dot=dot,
            )
    raise PreconditionError(f"unknown construction {config.kind!r}")


def cmd_fat(config: RunConfig, logger: Logger) -> CommandResult:
    match config.kind:
        case "check":
            p = load_tree(config.tree)
            report = is_fat(p, config.split_depth, config.probe_depth, logger=logger)
            return CommandResult(
                code=EXIT_OK if report.fat else EXIT_NEGATIVE,
                summary={"fat": report.fat, "missing": len(report.missing())},
                result=report.model_dump(mode="json"),
                transcript=[f"{len(report.entries)} node and shift pairs checked"],
            )
        case "build":
            A = load_clopen(config.clopen)
            tree = g0_tree_inside(A, config.levels, config.budget, logger=logger)
            explicit = tree.level_height(len(tree.blocks))
            depth = config.depth or explicit + 1
            return CommandResult(
                summary={"stem": tree.stem, "splits": tree.split_coordinates(explicit)},
                result=tree.model_dump(mode="json"),
                transcript=[
                    f"branches inside the set to depth {A.depth}",
                    f"fat after {config.levels} extension passes",
                ],
                dot=tree.to_finite(min(depth, 16)).to_dot("fat_tree"),
            )
        case "ladder":
            p = load_tree(config.tree)
            result = ladder(p, config.levels, config.budget, logger=logger)
            return CommandResult(
                summary={
                    "sizes": result.sizes,
                    "heights": result.heights,
                    "growth_law": result.growth_law_holds(),
                },
                result=result.model_dump(mode="json"),
                transcript=[
                    f"level {k}: height {h}, {n} leaves"
                    for k, (h, n) in enumerate(zip(result.heights, result.sizes))
                ],
                dot=result.tree(len(result.levels) - 1).to_dot("ladder"),
            )
    raise PreconditionError(f"unknown fat command {config.kind!r}")


COMMANDS = {
    "chromatic": cmd_chromatic,
    "construct": cmd_construct,
    "fat": cmd_fat,
}


# ============================================================================
# Rendering
# ============================================================================


def render(config: RunConfig, result: CommandResult) -> str:
    if config.format == FORMAT_DOT:
        if result.dot is None:
            raise PreconditionError(f"no DOT output for {config.command} {config.kind}")
        return result.dot
    if config.format == FORMAT_TEXT:
        lines = [f"{k}: {v}" for k, v in sorted(result.summary.items())]
        lines += [f"- {line}" for line in result.transcript]
        return "\n".join(lines) + "\n"
    payload = {
        "command": config.command,
        "kind": config.kind,
        "summary": result.summary,
        "result": result.result,
        "transcript": result.transcript,
    }
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit_error(report: ErrorReport) -> None:
    print(
        json.dumps(report.model_dump(mode="json"), sort_keys=True, ensure_ascii=False),
        file=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger = StdLogger()
    start = time.time()
    try:
        config = RunConfig.create(vars(args))
        config.validate()
        result = COMMANDS[config.command](config, logger)
        text = render(config, result)
    except TreeForcingError as e:
        _emit_error(e.report)
        return int(e.code)
    except (ValueError, OSError) as e:
        _emit_error(
            ErrorReport(code=EXIT_INPUT_ERROR, kind=type(e).__name__, message=str(e))
        )
        return EXIT_INPUT_ERROR

    if config.out:
        asyncio.run(dump_text(config.out, text))
    else:
        sys.stdout.write(text)
    logger.log_info(
        f"{config.command} finished in {TimeHelper.duration_ms_since(start)} ms",
        LOG_CATEGORY_KEY_POINT,
    )
    return result.code
