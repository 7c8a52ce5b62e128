import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel

from tkrank.config import RunConfig
from tkrank.formats import dump_model, write_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Command:
    """A subcommand: its name, the help text shown by argparse, how to add
    its flags, and the function that runs it (returns an exit code)."""
    name: str
    description: str
    configure: Callable[[argparse.ArgumentParser], None]
    func: Callable[[argparse.Namespace, RunConfig], int]

    def __call__(self, args: argparse.Namespace, config: RunConfig) -> int:
        return self.func(args, config)


def make_rng(config: RunConfig) -> np.random.Generator:
    return np.random.default_rng(config.seed)


def emit(model: BaseModel, path: Optional[str]) -> None:
    """Write an artifact to ``path``, or to stdout when no path is given."""
    if path:
        write_model(model, path)
        print(f"Saved to: {path}")
    else:
        sys.stdout.write(dump_model(model))


def emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
