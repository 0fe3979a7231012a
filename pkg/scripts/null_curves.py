"""Chance-similarity curves over random pairs of hierarchical partitions."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from _config import from_cli
from hierinfo.harness.cli import main


@dataclass
class Config:
    """Mean HMI, HE, EHMI, EHMI/HE and self-EHMI versus n."""

    n_list: list[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    pairs: int = 1000
    seed: int = 0
    threads: int = 8
    rel_sem: float = 0.01
    on_trivial: str = "leaf"
    out: str = "results/null_curves"


def run(cfg: Config) -> int:
    return main(["null-curves", "--n-list", ",".join(map(str, cfg.n_list)),
                 "--pairs", str(cfg.pairs), "--seed", str(cfg.seed),
                 "--threads", str(cfg.threads), "--rel-sem", str(cfg.rel_sem),
                 "--on-trivial", cfg.on_trivial, "--out", cfg.out])


if __name__ == "__main__":
    sys.exit(run(from_cli(Config)))
