"""
Entropy invariants of probabilistic graphs (chromatic, Koerner and
complementary graph entropy) and zero-error coding with side information.
"""

__version__ = "0.1.0"

from .config_manager import DEFAULT_LIMITS, ConfigManager, Limits
from .errors import (
    CapExceededError, DecodeAmbiguityError, GraphFormatError, GraphValidationError,
    NotExactError, TypeDenominatorError, ZeroErrorToolkitError,
)
from .graph_core import (
    GraphIsomorphism, ProbabilisticGraph, WeightVector, and_power, and_product, and_product_all,
    complement, complete, cycle, disjoint_union, empty, induced_subgraph, is_isomorphic, path, pentagon,
)
from .combinatorics import (
    IndependentSetFamily, PerfectnessCertificate, chromatic_number, clique_number,
    enumerate_independent_sets, is_perfect,
)
from .entropy import (
    Coloring, KoernerSolution, chromatic_entropy, chromatic_entropy_oracle, entropy_of,
    koerner_entropy, koerner_entropy_oracle,
)
from .hbar import (
    GraphFamily, HBarResult, TheoremCheckReport, eta_profile, hbar_exact, hbar_upper_bounds,
    verify_linearization, verify_theorem1,
)
from .coding import (
    CodeTable, JointSource, build_code, characteristic_graph, conditional_family, simulate,
)
