"""Exhaustive triangle-defect scans of HVI and d_n for small universes."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from _config import from_cli
from hierinfo.harness.cli import main


@dataclass
class Config:
    """Triangle-defect CCDFs for every n in n_list and both measures."""

    n_list: list[int] = field(default_factory=lambda: [2, 3, 4])
    out: str = "results/triangle"


def run(cfg: Config) -> int:
    status = 0
    for n in cfg.n_list:
        for measure in ("hvi", "dn"):
            status |= main(["scan-triangle", "--n", str(n), "--measure", measure, "--out", cfg.out])
    return status


if __name__ == "__main__":
    sys.exit(run(from_cli(Config)))
