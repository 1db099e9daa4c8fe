from src.services.losses.alpha_schemes import create_alpha_scheme, get_available_alpha_schemes
from src.services.losses.partition import block_mass, partition
from src.services.losses.reconstruction import bce_reconstruction, zero_reconstruction
from src.services.losses.regularization import encoding_l2, pathway_separation
from src.services.losses.schemas import BlockPartition, LossConfig, LossParts
from src.services.losses.total import total_loss

__all__ = [
    "BlockPartition",
    "LossConfig",
    "LossParts",
    "bce_reconstruction",
    "block_mass",
    "create_alpha_scheme",
    "encoding_l2",
    "get_available_alpha_schemes",
    "partition",
    "pathway_separation",
    "total_loss",
    "zero_reconstruction",
]
