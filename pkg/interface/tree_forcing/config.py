#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import builtins
import json

from typing import Any, Mapping, Optional, TypeVar, Type
from dataclasses import dataclass, fields

from .const import (
    DEFAULT_BUDGET,
    DEFAULT_PROBE_DEPTH,
    FORMAT_JSON,
    MAX_DEPTH,
    OUTPUT_FORMATS,
)


T = TypeVar("T", bound="BaseConfig")


@dataclass
class BaseConfig:
    """
    Base class for implementing configuration.
    Extra configuration fields can be added in inherited class.
    """

    @classmethod
    def create(cls: Type[T], props: Mapping[str, Any]) -> T:
        c = cls()
        c._init(props)
        return c

    def update(self, config: dict):
        for field in fields(self):
            val = config.get(field.name)
            if val is not None and val != "":
                setattr(self, field.name, val)

    def _init(self, props: Mapping[str, Any]):
        """
        Read typed values from props to initialize the dataclass config.
        """
        for field in fields(self):
            if field.name not in props or props[field.name] is None:
                continue
            val = props[field.name]
            try:
                match field.type:
                    case builtins.str:
                        if val != "":
                            setattr(self, field.name, str(val))
                    case builtins.bool:
                        if isinstance(val, str):
                            val = val.strip().lower() in ("1", "true", "yes")
                        setattr(self, field.name, bool(val))
                    case builtins.int:
                        setattr(self, field.name, int(val))
                    case builtins.float:
                        setattr(self, field.name, float(val))
                    case _:
                        if isinstance(val, str):
                            val = json.loads(val)
                        setattr(self, field.name, val)
            except (TypeError, ValueError) as e:
                raise ValueError(
                    f"Failed to read property {field.name}: {e}"
                ) from e


@dataclass
class RunConfig(BaseConfig):
    command: str = ""  # chromatic | construct | fat
    kind: str = ""  # subcommand kind, e.g. independent-tree or ladder
    graph: str = ""  # g0 | g1 | e0 | path to GraphSpec JSON
    tree: str = ""  # path to BlockTree JSON
    clopen: str = ""  # path to ClopenSet JSON
    relation: str = "g1"  # g1 | e0
    depth: int = 0
    split_depth: int = 3
    probe_depth: int = DEFAULT_PROBE_DEPTH
    levels: int = 2
    budget: int = DEFAULT_BUDGET
    out: str = ""
    format: str = FORMAT_JSON
    seed: Optional[int] = None  # draws the Ramsey samples of four-cycle
    verbose: bool = False

    def validate(self) -> None:
        if self.budget <= 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.depth < 0 or self.depth > MAX_DEPTH:
            raise ValueError(
                f"depth must lie in [0, {MAX_DEPTH}], got {self.depth}"
            )
        if self.split_depth < 0 or self.levels < 0:
            raise ValueError("split depth and levels must be non-negative")
        if self.probe_depth < self.split_depth:
            raise ValueError(
                f"probe depth {self.probe_depth} is below split depth {self.split_depth}"
            )
        if self.relation not in ("g1", "e0"):
            raise ValueError(f"relation must be g1 or e0, got {self.relation}")
        if self.format not in OUTPUT_FORMATS:
            raise ValueError(
                f"format must be one of {', '.join(OUTPUT_FORMATS)}, got {self.format}"
            )
