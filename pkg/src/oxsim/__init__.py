"""oxsim: performance model of a coherent optical crossbar AI accelerator."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    EvaluationError,
    InfeasibleError,
    OxsimError,
    TopologyError,
)
from .tech import (
    CalibrationProfile,
    TechParams,
    apply_profile,
    builtin_profiles,
    default_tech_params,
    get_profile,
)
from .photonics import (
    CouplerPlan,
    InputVector,
    LossBudget,
    WeightMatrix,
    coherent_detect,
    crossbar_mvm,
    loss_budget,
    quantize,
    synth_input_couplers,
    synth_output_couplers,
)
from .workload import (
    ChipConfig,
    Counts,
    LayerRuntime,
    LayerSpec,
    RuntimeStats,
    TileMap,
    bundled_topology_path,
    layer_runtime,
    load_topology,
    network_runtime,
    parse_topology,
    tile_layer,
)
from .perf import (
    PerfReport,
    Timeline,
    area_model,
    energy_model,
    evaluate,
    timeline_dual_core,
    timeline_single_core,
)
from .dse import (
    Constraints,
    OptimizationResult,
    SweepGrid,
    find_min_hiding_batch,
    optimize,
    pick_array_size,
    size_sram,
    sweep,
)

__all__ = [
    "__version__",
    "OxsimError", "ConfigError", "TopologyError", "EvaluationError", "InfeasibleError",
    "TechParams", "CalibrationProfile", "default_tech_params", "apply_profile",
    "builtin_profiles", "get_profile",
    "CouplerPlan", "WeightMatrix", "InputVector", "LossBudget",
    "synth_input_couplers", "synth_output_couplers", "quantize",
    "crossbar_mvm", "coherent_detect", "loss_budget",
    "LayerSpec", "ChipConfig", "TileMap", "Counts", "LayerRuntime", "RuntimeStats",
    "parse_topology", "load_topology", "bundled_topology_path",
    "tile_layer", "layer_runtime", "network_runtime",
    "Timeline", "PerfReport", "timeline_single_core", "timeline_dual_core",
    "energy_model", "area_model", "evaluate",
    "SweepGrid", "Constraints", "OptimizationResult",
    "sweep", "find_min_hiding_batch", "size_sram", "pick_array_size", "optimize",
]
