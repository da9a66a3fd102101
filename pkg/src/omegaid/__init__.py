"""Identities of edge colorings of finite complete graphs and the closure classes built from them."""

from __future__ import annotations

from .canon import canonicalize, certificate, equivalent, identity_of, restrict
from .closure import (
    ClassCatalog,
    cl_step,
    duplicate,
    eh_amalgam,
    end_duplicate,
    generate_ide,
    generate_idm,
    membership,
)
from .core import Coloring, Embedding, Identity, MalformedPartition, ResourceLimit, VIdentity, v_identity_of
from .forcing import (
    Condition,
    DefinabilityOracle,
    amalgamate,
    find_embeddings,
    generate_P,
    one_point_extensions,
    validate_condition,
    verify_lemma_qq,
    verify_t2_kernel,
)
from .realize import enumerate_identities, realized_identities, realized_v_identities, realizes, v_realizes
from .tree import (
    Branch,
    SpecialSequence,
    build_Im,
    meet_coloring,
    singleton_classes,
    special_sequences,
    tree_realizes,
    verify_s2_step,
    verify_t2_pair_claim,
)

__version__ = "0.1.0"
