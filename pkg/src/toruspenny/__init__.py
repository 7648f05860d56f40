"""Penny graphs and circle packings on the flat unit square torus."""

from .catalog import (
    CATALOG,
    K7_GENERATOR,
    CatalogEntry,
    DrawingVerdict,
    ToroidalDrawing,
    catalog_entry,
    check_drawing,
    drawing_from_edges,
    drawing_from_json,
    drawing_to_json,
    expected_graph,
    k5_config,
    k6_drawing,
    k7_lattice_drawing,
    k33_config,
    octahedral_config,
    octahedral_config_as_printed,
    octahedral_diameter,
    verify_drawing,
)
from .errors import (
    CatalogError,
    ConvergenceError,
    DegenerateConfigurationError,
    DegeneratePairError,
    InvalidInputError,
    MalformedDrawingError,
    ModeError,
    StructureError,
    TorusPennyError,
)
from .geometry import (
    POINT_GROUP,
    Displacement,
    IsometryMap,
    Segment,
    TorusPoint,
    apply_isometry,
    distance_multiplicity,
    find_isometry,
    min_displacement,
    realizing_displacements,
    segments_cross,
    squared_distance,
    torus_distance,
    wrap,
)
from .graphs import (
    PlanarityResult,
    SmallGraph,
    complete_graph,
    cycle_graph,
    harborth_bound,
    identify,
    is_bipartite,
    is_isomorphic,
    is_planar,
    k33,
    kuratowski_kind,
    named_graph,
    octahedron,
    path_graph,
)
from .optimizer import (
    OptimizeResult,
    OptimizerParams,
    RefineResult,
    SurveyClass,
    SurveyResult,
    maximize_min_distance,
    optimize,
    refine_contacts,
    refine_contacts_detailed,
    softmin_objective,
    uniqueness_survey,
)
from .packing import (
    Configuration,
    ContactGraph,
    PackingReport,
    PennyVerdict,
    analyze,
    config_from_json,
    config_to_json,
    contact_graph,
    load_config,
    packing_diameter,
    packing_diameter_exact,
    pair_squared_distances,
    verify_penny,
)
from .render import RenderOptions, Style, render_drawing, render_packing

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
