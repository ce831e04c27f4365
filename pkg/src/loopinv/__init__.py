"""Loop-trace local invariants of multi-qubit states.

Two-qubit correlation ("link") matrices are multiplied around closed paths
of sites; the trace of the product is invariant under local SU(2), and under
local SL(2,C) when every site on the path is spin flipped.
"""
from .errors import *  # noqa: F401,F403
from .invariants import (
    InvariantReport,
    TangleSet,
    catalogue,
    det_link_invariant,
    flipped_kempe_identity,
    flipped_pair_invariant,
    kempe_alternative,
    kempe_index_form,
    loop_invariant,
    purity_invariants,
    reconstruct_tangles,
    three_tangle_I6,
    wootters_tangle_oracle,
)
from .linkspace import (
    LinkMatrix,
    LoopSpec,
    adjoint_representation,
    flip_two_qubit,
    link_matrix,
    loop_transform,
    minkowski_eta,
    parse_loop,
)
from .qstate import (
    DensityMatrix,
    LocalOperation,
    PureState,
    apply_local,
    density_from_pure,
    ghz_state,
    haar_random_pure,
    partial_trace,
    pauli_coefficients,
    pauli_reconstruct,
    product_state,
    random_density,
    random_sl2c,
    random_su2,
    w_state,
)

__version__ = "0.1.0"
