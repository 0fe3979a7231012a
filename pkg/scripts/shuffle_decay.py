"""Decay of HMI and AHMI as k elements of a partition are shuffled."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from _config import from_cli
from hierinfo.harness.cli import main


@dataclass
class Config:
    """Mean HMI and AHMI between T and shuffle_k(T, k) for k = 0..n.

    AHMI needs an EHMI estimate per sample, so it is evaluated every
    ``ahmi_every`` steps of k (and at k = n); ``--ahmi-every 1`` covers every k.
    """

    n_list: list[int] = field(default_factory=lambda: [16, 32, 64])
    samples: int = 10_000
    ahmi_every: int = 4
    seed: int = 0
    threads: int = 8
    mean: str = "arithmetic"
    out: str = "results/shuffle_decay"


def run(cfg: Config) -> int:
    status = 0
    for n in cfg.n_list:
        ks = sorted(set(range(0, n + 1, max(cfg.ahmi_every, 1))) | {n})
        status |= main(["shuffle-decay", "--n-list", str(n), "--samples", str(cfg.samples),
                        "--ahmi-k", ",".join(map(str, ks)), "--seed", str(cfg.seed),
                        "--threads", str(cfg.threads), "--mean", cfg.mean,
                        "--out", f"{cfg.out}/n{n}"])
    return status


if __name__ == "__main__":
    sys.exit(run(from_cli(Config)))
