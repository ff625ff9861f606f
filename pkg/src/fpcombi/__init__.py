"""fpcombi: counting polynomial configurations on prime-field grids.

The package provides dense complex-valued functions on (Z/p)^D together with
the directional averaging toolkit built on them: conditional expectations
along lines, directional Gowers norms, complete exponential sums, counting
operators for polynomial-progression configurations, a van der Corput type
descent engine for polynomial families, and a CLI for error-decay scans.
"""

from .fpcore import (
    PrimeCtx,
    IntPoly,
    BivarPoly,
    ep,
    ep_table,
    is_prime,
    primes_between,
    poly_partial,
    poly_shift,
)
from .gridfn import (
    GridFunction,
    PhaseFunction,
    SubsetMask,
    GridParseError,
    conditional_expectation,
    fourier_along,
    fourier_reconstruct,
    read_grid,
    read_mask,
    read_phase,
    write_grid,
    write_mask,
    write_phase,
)
from .gowers import (
    NormResult,
    delta_mult,
    gowers_norm,
    gowers_u1,
    gowers_slice_identity,
    u2_fourier_identity,
)

from .charsum import WeylResult, weyl_sum, weyl_bound_scan

from .counting import (
    ConfigurationSpec,
    CountReport,
    DualSpec,
    SpecValidationError,
    count_in_set,
    counting_average,
    counting_profile,
    dual_function,
    error_report,
    find_config,
    main_term,
    product_lower_bound,
    twisted_average,
    validate,
)

from .pet import (
    NicenessReport,
    PetError,
    PolyFamily,
    TypeMatrix,
    VdcStep,
    derived_sets,
    is_nice,
    pet_trace,
    poly_equiv,
    type_less,
    type_of,
    vdc_step,
)

__version__ = "0.1.0"
