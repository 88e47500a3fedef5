"""Sector-resolved exact diagonalization and droplet-state toolkit for the
spin-1/2 ferromagnetic XXZ chain with boundary fields."""

__version__ = "0.1.0"

from .qcore import (
    AnisotropyParams,
    QBinomialTable,
    fq,
    fq_infinity,
    kink_gap_gamma_L,
    params_from_delta,
    params_from_q,
    qbinom,
)
from .basis import (
    SectorBasis,
    SectorVector,
    SpinConfiguration,
    compose_split,
    rank,
    sector_dimension,
    unrank,
)
from .operators import (
    BoundarySpec,
    DenseCapExceeded,
    GeneralizedSectorProjector,
    HamiltonianHandle,
    apply_hamiltonian,
    apply_polarized,
    apply_projector,
    assemble_dense,
    cut_identity_residual,
    double_commutator_apply,
    g_projector,
    translate,
)
from .states import (
    DropletSpec,
    KinkSpec,
    RingDropletSpec,
    build_droplet,
    build_kink,
    build_ring_droplet,
    coproduct_check,
    droplet_overlap,
    droplet_positions,
    droplet_residual,
    g_expectation_closed,
    kink_norm_sq_closed,
    mixed_overlap_closed,
    pair_overlap_closed,
    projform_expectation,
    ring_translation_overlap_closed,
    tensor_product,
)
from .spectral import (
    ConvergenceError,
    DropletFamily,
    EigenResult,
    RankDeficiencyError,
    SubspaceProjector,
    eig_dense,
    eig_lowest,
    gram_projector,
    projector_distance,
    rayleigh,
)
from .verify import CheckReport, REGISTRY, run_check, suite
