"""Dataclass configs with command-line overrides for the experiment scripts."""
from __future__ import annotations

import argparse
import dataclasses
import typing


def _parser_for(value_type):
    if value_type in (list[int], tuple[int, ...]):
        return lambda s: [int(x) for x in s.split(",") if x]
    return value_type


def from_cli(cls, argv=None):
    """Build ``cls`` from its defaults, overridden by ``--field value`` flags."""
    hints = typing.get_type_hints(cls)
    p = argparse.ArgumentParser(description=cls.__doc__)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if hints[f.name] is bool:
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=f.default)
        else:
            default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
            p.add_argument(flag, type=_parser_for(hints[f.name]), default=default)
    return cls(**vars(p.parse_args(argv)))
