import pytest
import torch

from src.services.datagen.dataset_service import generate_dataset
from src.services.datagen.schemas import MixingConfig
from src.services.model.autoencoder import MultiEncoderAutoencoder, build
from src.services.model.schemas import ModelConfig


@pytest.fixture
def tiny_config() -> ModelConfig:
    return ModelConfig(
        num_encoders=3,
        image_size=16,
        encoder_channels=[8, 16],
        encoding_channels=4,
        decoder_channels=[24, 12],
    )


@pytest.fixture
def tiny_model(tiny_config) -> MultiEncoderAutoencoder:
    return build(tiny_config, seed=0)


@pytest.fixture
def tiny_dataset():
    return generate_dataset(40, 16, MixingConfig(seed=1), split_fraction=0.8, threads=2)


def zero_decoder(model: MultiEncoderAutoencoder) -> None:
    """Every decoder weight and bias zero; output magnitude g zero so the weight-normed layer is zero too."""
    with torch.no_grad():
        for name, param in model.decoder.named_parameters():
            if name.endswith("original1") or ".norm." in f".{name}":
                continue
            param.zero_()
        for norm in model.decoder.norm:
            norm.bias.zero_()
