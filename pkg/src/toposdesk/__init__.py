"""toposdesk: desk-scale computations in finite simplicial presheaf toposes.

Finite categories and presheaves with exact (co)limits, the locally
cartesian closed structure, truncated simplicial objects with a lifting
solver, Reedy structures with latching/matching machinery, internal
equivalence objects, strict micro-universes for κ-small well-ordered
fibrations, and the degreewise extension of Reedy fibrations along
levelwise acyclic cofibrations.

All values are immutable after construction and all operations are pure;
per-site caches only memoize derived data and never change observable
results.
"""

from .cat import (
    FiniteCategory,
    arrow_category,
    discrete_category,
    product_category,
    simplex_category,
    terminal_category,
    validate_category,
)
from .errors import (
    BaseMismatch,
    BoundsExceeded,
    CapExceeded,
    NoLift,
    PreconditionError,
    SchemaError,
    SmallnessError,
    ToposError,
)
from .presheaf import (
    NatMap,
    Presheaf,
    find_iso,
    hom_enumerate,
    is_iso,
    is_mono,
    validate_natmap,
    validate_presheaf,
    yoneda,
)
from .limits import (
    DiagramShape,
    colimit,
    coproduct2,
    limit,
    product2,
    pullback,
    pushout,
)
from .lcc import SliceObject, beck_chevalley_check, local_exp, pi, pullback_along, sigma
from .simplicial import (
    LiftingProblem,
    SSite,
    TruncationConfig,
    boundary_ps,
    cotensor_interval,
    horn_ps,
    is_acyclic_fibration,
    is_fibration,
    simplex_ps,
    solve_lift,
    tensor,
)
from .reedy import (
    ReedyStructure,
    delta_reedy,
    elegance_evidence,
    generating_acyclic_cofibrations,
    is_reedy_cofibration,
    is_reedy_fibration,
    validate_reedy,
)
from .equiv import eq_object, eqlift, is_weq, iscontr, isequiv, mapping_path, path_object
from .universe import (
    Universe,
    WellOrderedFibration,
    classify,
    equivalence_extension,
    extend_classifier,
    saturation_check,
    smallness_check,
    soa_init,
    soa_step,
    universe_build,
)
from .extend import extend_reedy_fibration, verify_extension
from .suites import run_suite

__version__ = "0.1.0"
