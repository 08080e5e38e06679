# rwls/__init__.py
from .laws import (
    ExcursionTable,
    RejectionExcursions,
    SoupLaws,
    VertexLoopLaw,
    build_vertex_laws,
    interior_pivots,
)
from .soup import (
    LoopSoupSample,
    occupation_array,
    occupation_counts,
    read_soup,
    sample_rwls,
    shape_counts,
    write_soup,
)

__all__ = [
    "ExcursionTable",
    "RejectionExcursions",
    "SoupLaws",
    "VertexLoopLaw",
    "build_vertex_laws",
    "interior_pivots",
    "LoopSoupSample",
    "occupation_array",
    "occupation_counts",
    "read_soup",
    "sample_rwls",
    "shape_counts",
    "write_soup",
]
