"""Designs from group actions: orbit partitions of k-subsets and their certificates."""

from .designs import (
    BlockDecomposition,
    Design,
    TDesignCertificate,
    complement_design,
    decompose_block,
    design_from_json,
    design_from_maximal,
    design_from_orbit,
    design_to_json,
    lambda_s,
    max_t,
    merge_orbits,
    verify_t_design,
)
from .errors import (
    ConsistencyError,
    DesignforgeError,
    IngestError,
    InvalidPermutationError,
    ResourceLimitError,
    VerificationError,
)
from .ingest import (
    GeneratorFile,
    GroupRegistry,
    RegistryEntry,
    parse_cycles,
    parse_generator_file,
    parse_permutation,
    permutation_to_cycles,
    write_generator_file,
)
from .orbits import (
    Block,
    BlockOrbit,
    OrbitPartition,
    block_orbit,
    block_stabilizer_order,
    complement_partition,
    is_trivial_partition,
    orbit_partition,
    set_stabilizer,
    sigma_partition,
)
from .perm import ActionContext, PermGroup, Permutation, TransitivityDegree, minimal_block_size

__version__ = "0.1.0"

__all__ = [
    "ActionContext",
    "Block",
    "BlockDecomposition",
    "BlockOrbit",
    "ConsistencyError",
    "Design",
    "DesignforgeError",
    "GeneratorFile",
    "GroupRegistry",
    "IngestError",
    "InvalidPermutationError",
    "OrbitPartition",
    "PermGroup",
    "Permutation",
    "RegistryEntry",
    "ResourceLimitError",
    "TDesignCertificate",
    "TransitivityDegree",
    "VerificationError",
    "block_orbit",
    "block_stabilizer_order",
    "complement_design",
    "complement_partition",
    "decompose_block",
    "design_from_json",
    "design_from_maximal",
    "design_from_orbit",
    "design_to_json",
    "is_trivial_partition",
    "lambda_s",
    "max_t",
    "merge_orbits",
    "minimal_block_size",
    "orbit_partition",
    "parse_cycles",
    "parse_generator_file",
    "parse_permutation",
    "permutation_to_cycles",
    "set_stabilizer",
    "sigma_partition",
    "verify_t_design",
    "write_generator_file",
]
