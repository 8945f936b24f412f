"""Point-pattern clustering tests (ANN ratio, Ripley's K) applied to areal units
via centroid mapping, plus the simulation harness around them."""
from ._kernels import BACKEND
from .ann import AnnResult, Tail, WindowChoice, ann_test, nn_distances
from .areal import (
    AdjacencyRule,
    ArealStructure,
    ArealUnit,
    build_grid,
    compute_adjacency,
    dump_structure,
    load_structure,
)
from .dgm import ClusterRegionSpec, Draw, SampleSizeRule, sample_d1, sample_d2, sample_d3, sample_size
from .geometry import (
    Point,
    Polygon,
    Rect,
    Region,
    bounding_rect,
    contains,
    edge_weight,
    min_pairwise_distance,
    polygon_area,
    polygon_centroid,
)
from .harness import Scenario, SimulationReport, empirical_rate, render_tables, run_matrix, run_scenario
from .ripley import Envelope, KEstimate, KTestResult, RadiusGrid, k_hat, k_test, mc_envelope, radius_grid, sample_csr
from .theory import LatticeCount, divergence_table, lattice_count_closed, lattice_count_oracle

__version__ = "0.1.0"
