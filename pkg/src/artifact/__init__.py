"""Exact Frobenius arithmetic, point-count censuses, sieve numerics, and
GL2 conjugacy densities for the curve y^2 = x^3 - x and its companions."""

from .gaussian import (
    GaussInt,
    SquareFreeIdeal,
    canonical_associate,
    classify_gauss_prime,
    enumerate_primary_primes,
    exact_div,
    gauss_divides,
    gauss_divmod,
    gauss_gcd,
    ideal_d,
    ideal_from_primes,
    ideal_mobius,
    ideal_phi,
    is_primary,
    primary_associate,
    split_prime,
)
from .curve_orders import (
    FrobeniusData,
    brute_force_count,
    cyclotomic_factor,
    empirical_dE,
    frobenius,
    group_structure,
    order_pn,
)
from .factorint import (
    big_omega,
    factorize,
    is_prime,
    is_squarefree,
    omega,
    sieve_primes,
)
from .census import (
    CacheCorruptionError,
    CensusConfig,
    CensusTable,
    OrderRecord,
    common_factor_witness,
    compute_record,
    gauss_phi,
    is_almost_prime,
    load_cache,
    logarithmic_integral,
    pi_prime_count,
    pi_prime_reference,
    run_census,
    s_epsilon_member,
    verify_coprimality,
)
from .sieve_numerics import (
    CertificationError,
    InfeasibleConstraintError,
    QuadratureError,
    SieveDomainError,
    SieveParams,
    F_upper,
    F_vec,
    G_weighted,
    H_combined,
    PUBLISHED_PARAMS,
    bound_table,
    case_report,
    density_g,
    density_h,
    density_hstar,
    direct_pair_count,
    euler_product,
    euler_product_report,
    f_lower,
    f_vec,
    linear_sieve_fit_L,
    mobius_pair_inversion,
    optimize_params,
)
from .gl2 import (
    ConjClassTable,
    Mat2,
    c_E_compute,
    chebotarev_census,
    conjugacy_classes,
    count_Cq,
    count_Cq2,
    cq_trace_det_set,
    cq2_trace_det_set,
    extension_order_ratio,
    frobenius_power_trace,
    g_nonCM,
    gl2_order,
    trace_of_frobenius,
)

__version__ = "0.1.0"
