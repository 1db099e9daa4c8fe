from src.services.infer.schemas import DeadEncoderReport, SourceEstimate
from src.services.infer.separation_service import (
    crop,
    dead_encoder_score,
    decode_masked,
    estimate_all,
    mask_and_decode,
    save_estimates,
)

__all__ = [
    "DeadEncoderReport",
    "SourceEstimate",
    "crop",
    "dead_encoder_score",
    "decode_masked",
    "estimate_all",
    "mask_and_decode",
    "save_estimates",
]
