"""Dominance products and exact L-infinity closest pair in high dimensions."""
from .distprod import (allpairs_linf_integer, closest_pair_integer, maxplus_encoded,
                       maxplus_naive, minplus_encoded, minplus_naive)
from .dominance import BlockPlan, choose_block_size, dominance_blocked, dominance_naive
from .exponents import predict_exponent
from .geometry import (PairDistance, PointSet, RankTable, build_rank_tables, generate_points,
                       linf_distance, parse_points, write_points)
from .kernels import BitMatrix, KernelChoice, count_product, rect_via_square, strassen_square
from .linf import (ThresholdReport, closest_pair_bruteforce, closest_pair_deterministic,
                   closest_pair_randomized, pairs_within)

__version__ = "0.1.0"
