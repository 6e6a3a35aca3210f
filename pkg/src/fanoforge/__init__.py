"""Exact classification of canonical and terminal fake weighted projective
spaces, with Fine interiors of the associated one-interior-point simplices.

Everything is exact arithmetic: Python ints and Fractions, with guarded
int64 fast paths for bulk filtering.
"""

from .abelian import (
    TorsionElement,
    TorsionGroup,
    automorphisms,
    cokernel,
    lattice_kernel_basis,
)
from .census import (
    ClassificationRecord,
    ClassifyOptions,
    classify_all,
    classify_weight_vector,
    enumerate_weight_vectors,
    eta_normal_form,
    is_row_minimal,
    minimal_representative,
    minimal_torsion_rows,
    sylvester,
    torsion_order_cap,
    weight_sum_cap,
)
from .chart import AgeProfile, ChartElement, ages, chart_group, classify_chart
from .degmat import (
    DegreeMatrix,
    TorsionRow,
    degree_data_from_generator_matrix,
    is_almost_free,
    simplex,
    validate_weight_vector,
)
from .errors import (
    DimensionCapError,
    FanoForgeError,
    ResourceCapError,
    UnboundedRegionError,
    ValidationError,
)
from .fine import FineResult, fine_interior, kodaira_dimension, ord_value, plurigenus
from .intmat import hermite_row_form, smith_decomposition
from .polytope import (
    RationalPolytope,
    dual_description,
    from_halfspaces,
    from_vertices,
    lattice_points,
    segment_normal_form,
    simplex_polytope,
    unimodular_key,
)
from .singtest import SingularityClass, classify, lattice_point_oracle, r_value

__all__ = [
    "AgeProfile",
    "ChartElement",
    "ClassificationRecord",
    "ClassifyOptions",
    "DegreeMatrix",
    "DimensionCapError",
    "FanoForgeError",
    "FineResult",
    "RationalPolytope",
    "ResourceCapError",
    "SingularityClass",
    "TorsionElement",
    "TorsionGroup",
    "TorsionRow",
    "UnboundedRegionError",
    "ValidationError",
    "ages",
    "automorphisms",
    "chart_group",
    "classify",
    "classify_all",
    "classify_chart",
    "classify_weight_vector",
    "cokernel",
    "degree_data_from_generator_matrix",
    "dual_description",
    "enumerate_weight_vectors",
    "eta_normal_form",
    "fine_interior",
    "from_halfspaces",
    "from_vertices",
    "hermite_row_form",
    "is_almost_free",
    "is_row_minimal",
    "kodaira_dimension",
    "lattice_kernel_basis",
    "lattice_point_oracle",
    "lattice_points",
    "minimal_representative",
    "minimal_torsion_rows",
    "ord_value",
    "plurigenus",
    "r_value",
    "segment_normal_form",
    "simplex",
    "simplex_polytope",
    "smith_decomposition",
    "sylvester",
    "torsion_order_cap",
    "unimodular_key",
    "validate_weight_vector",
    "weight_sum_cap",
]

__version__ = "0.1.0"
