"""rootpacket: preferential-attachment tree simulator and packet-based root inference.

Core surface:

- :mod:`rootpacket.ba_tree`: the growth process, degrees, normalizers, exports.
- :mod:`rootpacket.packet`: the degree-product packet, the top-k baseline,
  and trajectory tracking.
- :mod:`rootpacket.limit_laws`: exact samplers and deterministic oracles for
  the limiting degree distributions.
- :mod:`rootpacket.mc_harness`: seed-reproducible verification experiments.
- :mod:`rootpacket.cli`: the ``rootpacket`` command.
"""

from .ba_tree import (
    GrowingTree,
    NormalizedDegreeView,
    alpha_of,
    attach_step,
    export_tree,
    from_parents,
    grow,
    grow_to,
    neighbors,
    normalized_degrees,
    parse_edge_list,
)
from .packet import (
    EpsilonPacket,
    TrajectoryRecord,
    checkpoint_grid,
    edge_score_exceeds,
    epsilon_packet,
    exact_packet_trajectory,
    packet_threshold,
    packet_trajectory,
    top_k_degree,
)
from .limit_laws import (
    BetaParams,
    ConditionalLimitParams,
    GGParams,
    JointLimitSample,
    analytic_cdf,
    joint_tail_probability,
    sample_adam_eve_limit,
    sample_beta,
    sample_gg,
    sample_limit_degree_conditional,
)
from .mc_harness import (
    ExperimentConfig,
    ResultTable,
    default_config,
    load_config,
    run_experiment,
)

__version__ = "0.1.0"
