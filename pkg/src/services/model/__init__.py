from src.services.model.autoencoder import MultiEncoderAutoencoder, build, concat_encodings
from src.services.model.schemas import ModelConfig

__all__ = [
    "ModelConfig",
    "MultiEncoderAutoencoder",
    "build",
    "concat_encodings",
]
