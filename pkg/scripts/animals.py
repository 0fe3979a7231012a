"""Clustering ensemble of the bundled animals data: central partition and vertex statistics."""
from __future__ import annotations

import sys
from dataclasses import dataclass

from _config import from_cli
from hierinfo.harness.cli import main


@dataclass
class Config:
    """Run the clustering pipeline on a feature CSV (bundled data when empty)."""

    data: str = ""
    out: str = "results/animals"


def run(cfg: Config) -> int:
    argv = ["cluster", "--out", cfg.out]
    if cfg.data:
        argv.insert(1, cfg.data)
    return main(argv)


if __name__ == "__main__":
    sys.exit(run(from_cli(Config)))
