import torch
import torch.nn.functional as F
from pydantic import ValidationError
from torch import nn
from torch.nn.utils.parametrizations import weight_norm

from src.management.exceptions import ConfigError, DataError
from src.services.model.schemas import ModelConfig

_CONV = {1: nn.Conv1d, 2: nn.Conv2d}
_CONV_TRANSPOSE = {1: nn.ConvTranspose1d, 2: nn.ConvTranspose2d}
_BATCH_NORM = {1: nn.BatchNorm1d, 2: nn.BatchNorm2d}

ACTIVATIONS: dict[str, type[nn.Module]] = {
    "relu": nn.ReLU,
    "leaky_relu": nn.LeakyReLU,
    "elu": nn.ELU,
    "gelu": nn.GELU,
}


class Encoder(nn.Module):
    """Stride-2 convolutions; batch norm and activation on every layer but the last."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        conv = _CONV[cfg.spatial_dims]
        batch_norm = _BATCH_NORM[cfg.spatial_dims]
        widths = [cfg.in_channels, *cfg.encoder_channels, cfg.encoding_channels]

        self.layer = nn.ModuleList(
            conv(w_in, w_out, kernel_size=cfg.kernel_size, stride=2, padding=cfg.kernel_size // 2)
            for w_in, w_out in zip(widths[:-1], widths[1:])
        )
        self.norm = nn.ModuleList(batch_norm(width) for width in cfg.encoder_channels)
        self.activation = ACTIVATIONS[cfg.activation]()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for index, conv in enumerate(self.layer):
            x = conv(x)
            if index < len(self.norm):
                x = self.activation(self.norm[index](x))
        return x


class Decoder(nn.Module):
    """Transposed convolutions with one group-norm group per encoder pathway.

    The output layer is weight-normalized and squashed by a sigmoid; it is the
    only layer left out of the pathway partition.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        conv_transpose = _CONV_TRANSPOSE[cfg.spatial_dims]
        widths = [cfg.latent_channels, *cfg.decoder_channels, cfg.in_channels]

        self.num_groups = cfg.num_encoders
        self.layer = nn.ModuleList(
            conv_transpose(w_in, w_out, kernel_size=4, stride=2, padding=1)
            for w_in, w_out in zip(widths[:-1], widths[1:])
        )
        # ConvTranspose weights are (C_in, C_out, ...): normalize per output channel.
        weight_norm(self.layer[-1], dim=1)
        self.norm = nn.ModuleList(nn.GroupNorm(cfg.num_encoders, width) for width in cfg.decoder_channels)
        self.activation = ACTIVATIONS[cfg.activation]()

    def forward(self, Z: torch.Tensor, frozen_affine: bool = False) -> torch.Tensor:
        x = Z
        for index, conv in enumerate(self.layer):
            x = conv(x)
            if index < len(self.norm):
                norm = self.norm[index]
                if frozen_affine:
                    x = F.group_norm(x, norm.num_groups, norm.weight.detach(), norm.bias.detach(), norm.eps)
                else:
                    x = norm(x)
                x = self.activation(x)
        return torch.sigmoid(x)

    def pathway_weights(self) -> list[tuple[str, torch.Tensor]]:
        """Hidden-layer weights in (C_in, C_out, taps...) orientation."""
        return [(f"decoder.layer.{index}.weight", conv.weight) for index, conv in enumerate(self.layer[:-1])]

    @property
    def output_layer(self) -> nn.Module:
        return self.layer[-1]


class MultiEncoderAutoencoder(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.config = cfg
        self.encoder = nn.ModuleList(Encoder(cfg) for _ in range(cfg.num_encoders))
        self.decoder = Decoder(cfg)

    @property
    def num_encoders(self) -> int:
        return self.config.num_encoders

    def encode_all(self, x: torch.Tensor) -> list[torch.Tensor]:
        expected = self.config.input_shape
        if x.dim() != len(expected) + 1 or tuple(x.shape[1:]) != expected:
            raise DataError(f"Expected input of shape (B, {', '.join(map(str, expected))}), got {tuple(x.shape)}")
        return [encoder(x) for encoder in self.encoder]

    def decode(self, Z: torch.Tensor, frozen_affine: bool = False) -> torch.Tensor:
        expected = (self.config.latent_channels, *self.config.encoding_shape[1:])
        if Z.dim() != len(expected) + 1 or tuple(Z.shape[1:]) != expected:
            raise DataError(f"Expected encoding of shape (B, {', '.join(map(str, expected))}), got {tuple(Z.shape)}")
        return self.decoder(Z, frozen_affine=frozen_affine)

    def forward(self, x: torch.Tensor) -> tuple[list[torch.Tensor], torch.Tensor]:
        z = self.encode_all(x)
        return z, self.decode(concat_encodings(z))

    def zero_encoding(self, batch_size: int) -> torch.Tensor:
        reference = next(self.decoder.parameters())
        shape = (batch_size, self.config.latent_channels, *self.config.encoding_shape[1:])
        return torch.zeros(shape, dtype=reference.dtype, device=reference.device)

    def normalization_affine_parameters(self) -> list[nn.Parameter]:
        params = []
        for module in self.modules():
            if isinstance(module, (nn.GroupNorm, nn.BatchNorm1d, nn.BatchNorm2d)) and module.affine:
                params.extend([module.weight, module.bias])
        return params


def concat_encodings(z: list[torch.Tensor]) -> torch.Tensor:
    """Concatenate along channels, keeping encoder order."""
    if not z:
        raise DataError("Cannot concatenate an empty list of encodings")
    reference = tuple(z[0].shape)
    for index, encoding in enumerate(z[1:], start=1):
        if tuple(encoding.shape) != reference:
            raise DataError(f"Encoding {index} has shape {tuple(encoding.shape)}, expected {reference}")
    if len(z) == 1:
        return z[0]
    return torch.cat(z, dim=1)


def build(
    cfg: ModelConfig,
    seed: int = 0,
    dtype: torch.dtype = torch.float32,
    device: str | torch.device = "cpu",
) -> MultiEncoderAutoencoder:
    try:
        cfg = ModelConfig.model_validate(cfg.model_dump())
    except ValidationError as exc:
        raise ConfigError(f"Invalid model config: {exc}")

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        model = MultiEncoderAutoencoder(cfg)
    return model.to(device=device, dtype=dtype)
