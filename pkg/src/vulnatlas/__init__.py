"""Climate-change vulnerability assessment engine.

Household surveys and geospatial grids go in; hierarchical weighted
vulnerability indices, fire-risk maps, and an HTTP decision-support API
come out.
"""

from .catalog import (
    Aggregation,
    CatalogError,
    Determinant,
    IndicatorCatalog,
    IndicatorDefinition,
    IndicatorSource,
    Polarity,
    WeightConfig,
    WeightError,
    default_catalog,
    default_weights,
    load_catalog,
    load_weights,
    serialize_catalog,
    serialize_weights,
    validate_weights,
)
from .indices import (
    AssessmentError,
    AssessmentResult,
    IndicatorMatrix,
    classify_quantiles,
    compute_assessment,
    hotspot_gi_star,
    normalize,
    rollup,
    weighted_index,
)
from .raster import (
    Grid,
    GridAlignmentError,
    GridFormatError,
    ReclassTable,
    aspect,
    change_matrix,
    proximity,
    rasterize_polygons,
    read_ascii_grid,
    reclassify,
    slope,
    write_ascii_grid,
    zonal_stats,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregation",
    "AssessmentError",
    "AssessmentResult",
    "CatalogError",
    "Determinant",
    "Grid",
    "GridAlignmentError",
    "GridFormatError",
    "IndicatorCatalog",
    "IndicatorDefinition",
    "IndicatorMatrix",
    "IndicatorSource",
    "Polarity",
    "ReclassTable",
    "WeightConfig",
    "WeightError",
    "aspect",
    "change_matrix",
    "classify_quantiles",
    "compute_assessment",
    "default_catalog",
    "default_weights",
    "hotspot_gi_star",
    "load_catalog",
    "load_weights",
    "normalize",
    "proximity",
    "rasterize_polygons",
    "read_ascii_grid",
    "reclassify",
    "rollup",
    "serialize_catalog",
    "serialize_weights",
    "slope",
    "validate_weights",
    "weighted_index",
    "write_ascii_grid",
    "zonal_stats",
]
