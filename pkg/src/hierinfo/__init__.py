"""Information theory for hierarchical partitions."""

__version__ = "0.1.0"

from .hpart import (  # noqa: F401
    HierPartition,
    apply_permutation,
    canonical_form,
    level_partition,
    parse,
    serialize,
    validate,
)
from .infotheory import (  # noqa: F401
    MeanKind,
    dn,
    hce,
    hentropy,
    hje,
    hmi_levels,
    hmi_recursive,
    hvi,
    hvi_total,
    nhmi,
    triangle_defect,
    vertex_hmi_terms,
)
from .nullmodel import ahmi, ehmi, make_rng, shuffle_k  # noqa: F401
