"""Binary tree-child phylogenetic networks: reduction, augmentation,
exhaustive generation, counting bounds and isomorphism checks."""

from .augmentation import (
    FeasiblePair,
    LeafType,
    RecoveringData,
    augment,
    augment_H,
    augment_T,
    is_feasible,
)
from .counting import BoundTable, bound_table, bound_total, f_h, f_t, p_aux
from .enumeration import (
    EstimateReport,
    GenerationConfig,
    count_exact,
    count_feasible_pairs,
    enumerate_feasible_pairs,
    estimate_count,
    generate_all,
    offspring,
    offspring_count,
    random_network,
    sample_feasible_pair,
)
from .errors import BTCError
from .isocheck import (
    automorphisms,
    brute_force_isomorphic,
    canonical_key,
    isomorphic,
    mu_vectors,
)
from .network import (
    Network,
    NodeKind,
    ValidationReport,
    eliminate_elementary,
    new_trivial,
    split_above,
    validate_btc,
)
from .reduction import THPath, decompose, leaf_type, reduce, replay, th_path
from .serialize import (
    format_pair,
    parse,
    parse_many,
    parse_pair,
    serialize,
    to_edgelist,
    to_enewick,
)

__version__ = "0.1.0"
