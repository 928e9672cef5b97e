"""Exact ideal theory, normalization and divisor/Picard computations for
finitely generated pointed monoids and monoid schemes."""

from .cones import Face, RationalCone, hilbert_basis
from .divisors import (
    CartierReport,
    CochainComplex,
    ExcisionReport,
    MayerVietorisReport,
    PicClComparison,
    PosetSheaf,
    SixTermReport,
    WeilDivisor,
    cartier_report,
    cartier_to_weil,
    class_group,
    class_group_presentation,
    excision,
    global_units_group,
    is_locally_factorial,
    les_of_sheaf_ses,
    mayer_vietoris,
    nor_comparison,
    pic_cl_comparison,
    picard_group,
    point_valuation,
    principal_divisor,
    pullback_pic_hom,
    units_sheaf,
    weil_to_cartier,
)
from .ideals import (
    MonoidIdeal,
    PrimeIdeal,
    intersect_primes,
    mspec,
    nil_ideal,
    reduced_monoid,
)
from .lattice import (
    Hom,
    IntMatrix,
    PresentedAbGroup,
    SmithForm,
    Subquotient,
    cokernel,
    smith_normal_form,
)
from .monoid import (
    ZERO,
    AffineMonoid,
    AmbientGroup,
    GroupElement,
    GroupHom,
    MonoidHom,
    PcMonoid,
    UnitGroup,
)
from .normalization import (
    DiscreteValuation,
    DvMonoidStructure,
    NormalizationScheme,
    SectionsMonoid,
    class_group_of_affine,
    dv_factor,
    dv_structure,
    in_normalization,
    in_seminormalization,
    is_integral_over,
    is_normal,
    is_seminormal,
    normalization_scheme,
    normalize,
    seminormalize,
    valuations_at_height_one,
)
from .oracle import EnumerationBudget, Verdict, enumerate_elements, verify
from .scheme import (
    Fan,
    MonoidScheme,
    SchemeMap,
    components_decomposition,
    disjoint_union,
    from_fan,
    glue,
    glue_along_generic,
    mspec_scheme,
    product,
    projection_map,
    projective_fan,
    projective_space,
    scheme_isomorphic,
    scheme_normalization,
    scheme_reduced,
    scheme_seminormalization,
    wedge,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
