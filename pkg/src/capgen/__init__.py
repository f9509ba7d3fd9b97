"""Random generation of capacities, approximately uniform over the capacity polytope."""

from .core import (
    Alternative,
    Capacity,
    CardLexOrder,
    card_lex_masks,
    choquet,
    free_subsets,
    is_monotone,
    unconditional_rank_bounds,
)
from .extensions import ecg_sample, enumerate_linear_extensions, maximal_elements
from .markov import RankProbabilityTable, chain_step, estimate_rank_table, markov_generate
from .node_gen import irng_generate, rng_generate, sample_beta
from .preferences import ConstraintSystem, PreferenceSystem, derive_SC, satisfies_SC, satisfies_SR
from .constrained import (
    filter_SR,
    revised_ecg_sample,
    revised_enumerate,
    revised_irng_generate,
)
from .evaluate import kl_divergence, kl_report, kl_table

__version__ = "0.1.0"
