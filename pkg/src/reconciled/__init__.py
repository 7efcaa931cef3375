"""Two-party protocols for computing functions of reconciled sets."""

from .analysis import (AnalysisParams, accept_probability, collision_probability,
                       expected_bits_bounded, expected_bits_unbounded, heuristic_k,
                       optimal_k, simulate_vs_formula)
from .gf2hash import (HashSequence, LinearHash, apply, collision_rate_mc,
                      preimage_histogram, sample_full_rank)
from .model import (Instance, Message, Outcome, PartyView, ProtocolError, Transcript,
                    make_instance, oracle_value, random_instance)
from .protocols import (REGISTRY, disjointness_via_sum, idempotent_exchange,
                        las_vegas_sum, naive_intersection, reconcile_then_compute,
                        run_protocol, sum_via_intersection, trivial_sum)
from .rectangles import (comm_lower_bound, literature_bounds, product_fooling_families,
                         rectangle_count_lower_bound, sum_fooling_families,
                         verify_fooling)

__version__ = "0.1.0"
