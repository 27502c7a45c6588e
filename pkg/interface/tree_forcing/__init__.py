#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#

from .cantor_core import (
    Word,
    Point,
    ClopenSet,
    DenseSequence,
    DENSE,
    dense_seq,
    unit,
    xor,
    refine,
    stem_of,
    clopen_algebra,
)
from .tree_algebra import (
    BlockTree,
    FiniteTree,
    LazyTree,
    FusionSequence,
    nodes_at,
    sigma_star,
    splitting_level,
    restrict_tree,
    is_subtree,
    leq_n,
    amalgamate,
    fusion,
    branches_subset,
)
from .graphs import (
    EdgeCertificate,
    FiniteGraph,
    ClopenGraph,
    GraphSpec,
    G0Graph,
    G1Graph,
    E0Relation,
    BoxGraph,
    PullbackGraph,
    WordMap,
    edge,
    restrict,
    pullback,
    chromatic_number,
    clopen_independence_witness,
    check_homomorphism,
    ramsey_find,
)
from .constructions import (
    IndependentTree,
    CliqueEvidence,
    Undecided,
    FourCycle,
    agrees_with,
    independent_tree,
    density_dichotomy,
    perfect_clique,
    four_cycle,
    independent_image,
)
from .fat_trees import (
    FatnessReport,
    Ladder,
    is_fat,
    fatclaim_step,
    fat_extend,
    g0_tree_inside,
    ladder,
    ladder_leq,
    Slalom,
    slalom_cover,
)
from .message import (
    ErrorCode,
    TreeForcingError,
    PreconditionError,
    EmptyInputError,
    MalformedInputError,
    BudgetExceededError,
    CertificateViolationError,
    RefuterFailureError,
    DensityFailureError,
    FatnessMissingError,
    NotFoundError,
)
from .helper import StdLogger, TimeHelper
from .config import BaseConfig, RunConfig
from .dumper import Dumper
from .types import parse_graph_spec, parse_block_tree, parse_clopen

# Specify what should be imported when a user imports * from the
# tree_forcing package.
__all__ = [
    "Word",
    "Point",
    "ClopenSet",
    "DenseSequence",
    "DENSE",
    "dense_seq",
    "unit",
    "xor",
    "refine",
    "stem_of",
    "clopen_algebra",
    "BlockTree",
    "FiniteTree",
    "LazyTree",
    "FusionSequence",
    "nodes_at",
    "sigma_star",
    "splitting_level",
    "restrict_tree",
    "is_subtree",
    "leq_n",
    "amalgamate",
    "fusion",
    "branches_subset",
    "EdgeCertificate",
    "FiniteGraph",
    "ClopenGraph",
    "GraphSpec",
    "G0Graph",
    "G1Graph",
    "E0Relation",
    "BoxGraph",
    "PullbackGraph",
    "WordMap",
    "edge",
    "restrict",
    "pullback",
    "chromatic_number",
    "clopen_independence_witness",
    "check_homomorphism",
    "ramsey_find",
    "IndependentTree",
    "CliqueEvidence",
    "Undecided",
    "FourCycle",
    "agrees_with",
    "independent_tree",
    "density_dichotomy",
    "perfect_clique",
    "four_cycle",
    "independent_image",
    "FatnessReport",
    "Ladder",
    "is_fat",
    "fatclaim_step",
    "fat_extend",
    "g0_tree_inside",
    "ladder",
    "ladder_leq",
    "Slalom",
    "slalom_cover",
    "ErrorCode",
    "TreeForcingError",
    "PreconditionError",
    "EmptyInputError",
    "MalformedInputError",
    "BudgetExceededError",
    "CertificateViolationError",
    "RefuterFailureError",
    "DensityFailureError",
    "FatnessMissingError",
    "NotFoundError",
    "StdLogger",
    "TimeHelper",
    "BaseConfig",
    "RunConfig",
    "Dumper",
    "parse_graph_spec",
    "parse_block_tree",
    "parse_clopen",
]
