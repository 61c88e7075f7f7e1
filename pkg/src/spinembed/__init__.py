"""spinembed: resilient embedding of bounded-degree bipartite guests into
adversarially thinned random hosts, via dense-pair partitions shaped like a
spin-graph backbone, candidate-graph matchings, and sequential candidate-set
assignment.  Includes a polychromatic (rainbow) embedding harness."""

from .graphs import (
    AdversarySpec,
    Graph,
    GuestSpec,
    adversary_delete,
    bandwidth_of_labeling,
    gen_gnp,
    gen_guest,
    read_edgelist,
    verify_min_degree_ratio,
    write_edgelist,
)
from .density import (
    Bad_lsets,
    DenseVerdict,
    DensityParams,
    SetFamily,
    bad_lsets,
    check_boundedness,
    check_dense_exact,
    check_dense_mc,
    check_expansion,
    corrupted_vertices,
    count_stars,
    crosscut_partition,
    gnp_stats,
    p_density,
)
from .spin import SpinGraph, is_homomorphism, is_role_homomorphism, ladder, roles_adjacent, spin_graph
from .matching import CandidateGraph, check_matching_conditions, hall_matching, neighborhood_distance
from .hpartition import (
    HPartition,
    equitable_coloring,
    lolly_bounds_report,
    lolly_homomorphism,
    lolly_target,
    partition_H,
    verify_H_partition,
)
from .gpartition import (
    GPartition,
    ReducedGraph,
    carve_clusters,
    find_spanning_ladder,
    reduced_min_degree,
    regularity_partition,
    verify_G_partition,
)
from .embed import (
    BlowupParams,
    CandidateSystem,
    ConnClass,
    ConnParams,
    ConstraintSets,
    ForbiddenFamily,
    PipelineParams,
    PlantedSizes,
    blowup_embed,
    candidate_graph,
    connection_embed,
    full_embed,
    gen_aligned_guest,
    gen_planted_spin_host,
    switching_repair,
    verify_embedding,
)
from .rainbow import EdgeColoring, bunt_stats, gamma_phi, gen_k_bounded, rainbow_experiment
from .cli import ExperimentConfig, compute_p, run
from .seeds import derive_seed

__version__ = "0.1.0"
