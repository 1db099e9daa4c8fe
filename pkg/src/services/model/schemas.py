from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Activation = Literal["relu", "leaky_relu", "elu", "gelu"]


class ModelConfig(BaseModel):
    """Architecture of the N-encoder, single-decoder autoencoder."""

    model_config = ConfigDict(extra="forbid")

    num_encoders: int = Field(default=3, ge=1)
    in_channels: int = Field(default=1, ge=1)
    image_size: int = Field(default=64, ge=1)
    spatial_dims: Literal[1, 2] = 2
    encoder_channels: list[int] = Field(default_factory=lambda: [32, 64, 128])
    encoding_channels: int = Field(default=16, ge=1)
    decoder_channels: list[int] = Field(default_factory=lambda: [384, 192, 96])
    kernel_size: int = Field(default=3, ge=1)
    activation: Activation = "relu"

    @model_validator(mode="after")
    def _check_architecture(self) -> "ModelConfig":
        for width in self.decoder_channels:
            if width % self.num_encoders:
                raise ValueError(
                    f"decoder width {width} is not divisible by num_encoders={self.num_encoders}"
                )
        if len(self.decoder_channels) != len(self.encoder_channels):
            raise ValueError(
                f"decoder_channels needs {len(self.encoder_channels)} entries to mirror "
                f"encoder_channels, got {len(self.decoder_channels)}"
            )
        if self.kernel_size % 2 == 0:
            raise ValueError(f"kernel_size must be odd, got {self.kernel_size}")
        if self.image_size % self.down_factor:
            raise ValueError(
                f"image_size {self.image_size} must be divisible by {self.down_factor} "
                f"({self.num_layers} stride-2 layers)"
            )
        return self

    @property
    def num_layers(self) -> int:
        return len(self.encoder_channels) + 1

    @property
    def down_factor(self) -> int:
        return 2**self.num_layers

    @property
    def input_shape(self) -> tuple[int, ...]:
        return (self.in_channels, *([self.image_size] * self.spatial_dims))

    @property
    def encoding_shape(self) -> tuple[int, ...]:
        side = self.image_size // self.down_factor
        return (self.encoding_channels, *([side] * self.spatial_dims))

    @property
    def latent_channels(self) -> int:
        return self.num_encoders * self.encoding_channels
