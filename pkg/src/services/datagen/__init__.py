from src.services.datagen.dataset_service import DatasetStore, generate_dataset, get_dataset_store
from src.services.datagen.mixing import minmax_scale, mix
from src.services.datagen.shapes import downsample_bilinear, render_shape

__all__ = [
    "DatasetStore",
    "generate_dataset",
    "get_dataset_store",
    "minmax_scale",
    "mix",
    "downsample_bilinear",
    "render_shape",
]
