#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
LOG_CATEGORY_KEY_POINT = "key_point"
LOG_CATEGORY_SEARCH = "search"
LOG_CATEGORY_VERIFY = "verify"

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_BUDGET_EXCEEDED = 2
EXIT_NEGATIVE = 3

MAX_DEPTH = 24  # guard for 2^n vertex sets
MAX_EXACT_COLORING_DEPTH = 14
RAMSEY_R4 = 18  # R(4,4)

DEFAULT_BOUND = 64  # search depth for splitting nodes
DEFAULT_BUDGET = 100_000
DEFAULT_PROBE_DEPTH = 16
DEFAULT_COLORING_BUDGET = 2_000_000  # backtracking nodes
DEFAULT_PAIR_BUDGET = 250_000  # point pairs for homomorphism checks
DEFAULT_DEPTH_OUT = 12
DEFAULT_LADDER_PROBE = 4096  # largest coordinate searched for ladder splits
DEFAULT_COMPATIBILITY_BOUND = 4

FORMAT_JSON = "json"
FORMAT_DOT = "dot"
FORMAT_TEXT = "text"
OUTPUT_FORMATS = (FORMAT_JSON, FORMAT_DOT, FORMAT_TEXT)
