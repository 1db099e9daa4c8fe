import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from pathlib import Path

import numpy as np

from src.management.exceptions import DataError
from src.management.logger import configure_logger
from src.management.settings import get_settings
from src.services.datagen.mixing import mix
from src.services.datagen.schemas import (
    DatasetManifest,
    DatasetSplit,
    MixingConfig,
    MixtureSample,
    MixtureSet,
    ShapeKind,
    ShapeSpec,
)
from src.services.datagen.shapes import downsample_bilinear, render_shape

logger = configure_logger("DataGen", "blue")

SCALE_RANGE = (0.40, 0.60)
RENDER_FACTOR = 2
MANIFEST_NAME = "manifest.json"
ROLE_FILES = ("mixtures", "triangles", "circles")


def sample_shape(kind: ShapeKind, rng: np.random.Generator) -> ShapeSpec:
    """Uniform scale, then redraw the position until the shape fits."""
    scale = float(rng.uniform(*SCALE_RANGE))
    while True:
        spec = ShapeSpec(
            kind=kind,
            center_x=float(rng.uniform(0.0, 1.0)),
            center_y=float(rng.uniform(0.0, 1.0)),
            scale=scale,
        )
        if spec.fits():
            return spec


def generate_sample(seed: int, image_size: int, cfg: MixingConfig) -> MixtureSample:
    rng = np.random.default_rng((seed, 0))
    render_size = image_size * RENDER_FACTOR
    sources = [
        downsample_bilinear(render_shape(sample_shape(kind, rng), render_size), image_size)
        for kind in MixtureSet.ROLES
    ]
    return mix(sources[0], sources[1], cfg.model_copy(update={"seed": seed}))


def sample_seeds(seed: int, n_pairs: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(n_pairs, dtype=np.uint32)


def generate_dataset(
    n_pairs: int,
    image_size: int,
    cfg: MixingConfig,
    split_fraction: float = 0.8,
    threads: int | None = None,
) -> DatasetSplit:
    if n_pairs < 1:
        raise DataError(f"n_pairs must be at least 1, got {n_pairs}")
    if not 0.0 < split_fraction < 1.0:
        raise DataError(f"split_fraction must lie in (0, 1), got {split_fraction}")
    if image_size * RENDER_FACTOR < 8:
        raise DataError(f"image_size {image_size} is too small to render")

    workers = threads or get_settings().threads
    seeds = sample_seeds(cfg.seed, n_pairs)
    logger.info(f"Generating {n_pairs} pairs at {image_size}px with {workers} worker(s)")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        samples = list(pool.map(lambda s: generate_sample(int(s), image_size, cfg), seeds))

    everything = MixtureSet.from_samples(samples, image_size)
    n_train = int(round(n_pairs * split_fraction))
    manifest = DatasetManifest(
        image_size=image_size,
        n_pairs=n_pairs,
        n_train=n_train,
        n_test=n_pairs - n_train,
        split_fraction=split_fraction,
        seed=cfg.seed,
        mixing=cfg,
    )
    logger.info(f"Dataset ready: {manifest.n_train} train / {manifest.n_test} test")
    return DatasetSplit(train=everything[:n_train], test=everything[n_train:], manifest=manifest)


class DatasetStore:
    def __init__(self, cache_dir: Path | None = None):
        self.cache_dir = Path(cache_dir or get_settings().cache)

    def save(self, split: DatasetSplit, out_dir: Path) -> Path:
        if split.manifest is None:
            raise DataError("Cannot save a dataset without a manifest")
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        files: dict[str, str] = {}
        for split_name, subset in (("train", split.train), ("test", split.test)):
            arrays = dict(zip(ROLE_FILES, (subset.mixtures, subset.triangles, subset.circles)))
            for role, array in arrays.items():
                file_name = f"{split_name}_{role}.f32"
                array.astype("<f4").tofile(out_dir / file_name)
                files[f"{split_name}.{role}"] = file_name
            seeds_name = f"{split_name}_seeds.u32"
            subset.seeds.astype("<u4").tofile(out_dir / seeds_name)
            files[f"{split_name}.seeds"] = seeds_name

        manifest = split.manifest.model_copy(update={"files": files})
        (out_dir / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))
        split.manifest = manifest
        logger.info(f"Dataset written to {out_dir}")
        return out_dir

    def load(self, data_dir: Path) -> DatasetSplit:
        data_dir = Path(data_dir)
        manifest_path = data_dir / MANIFEST_NAME
        if not manifest_path.exists():
            raise DataError(f"No dataset manifest found at {manifest_path}")
        try:
            manifest = DatasetManifest.model_validate_json(manifest_path.read_text())
        except ValueError as exc:
            raise DataError(f"Invalid dataset manifest {manifest_path}: {exc}")

        size = manifest.image_size
        subsets = {}
        for split_name, count in (("train", manifest.n_train), ("test", manifest.n_test)):
            arrays = []
            for role in ROLE_FILES:
                array = self._read_blob(data_dir, manifest, f"{split_name}.{role}", "<f4", count * size * size)
                arrays.append(array.reshape(count, size, size))
            seeds = self._read_blob(data_dir, manifest, f"{split_name}.seeds", "<u4", count)
            subsets[split_name] = MixtureSet(*arrays, seeds=seeds)

        logger.debug(f"Loaded dataset from {data_dir}: {manifest.n_train} train / {manifest.n_test} test")
        return DatasetSplit(train=subsets["train"], test=subsets["test"], manifest=manifest)

    def cache_key(self, n_pairs: int, image_size: int, cfg: MixingConfig, split_fraction: float) -> str:
        payload = json.dumps(
            {
                "n_pairs": n_pairs,
                "image_size": image_size,
                "split_fraction": split_fraction,
                "mixing": cfg.model_dump(),
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def resolve(
        self,
        n_pairs: int,
        image_size: int,
        cfg: MixingConfig,
        split_fraction: float = 0.8,
        out_dir: Path | None = None,
        threads: int | None = None,
    ) -> tuple[DatasetSplit, Path]:
        """Generate into `out_dir`, or into the cache and reuse a previous run."""
        if out_dir is None:
            out_dir = self.cache_dir / f"tc-{image_size}px-{n_pairs}-{self.cache_key(n_pairs, image_size, cfg, split_fraction)}"
            if (out_dir / MANIFEST_NAME).exists():
                logger.info(f"Cache hit: {out_dir}")
                return self.load(out_dir), out_dir

        split = generate_dataset(n_pairs, image_size, cfg, split_fraction, threads=threads)
        return split, self.save(split, out_dir)

    @staticmethod
    def _read_blob(data_dir: Path, manifest: DatasetManifest, key: str, dtype: str, count: int) -> np.ndarray:
        file_name = manifest.files.get(key)
        if file_name is None:
            raise DataError(f"Dataset manifest does not list '{key}'")
        path = data_dir / file_name
        if not path.exists():
            raise DataError(f"Missing dataset file {path}")
        array = np.fromfile(path, dtype=dtype)
        if array.size != count:
            raise DataError(f"{path} holds {array.size} values, expected {count}")
        return array.astype(dtype[1:] if dtype.startswith("<") else dtype)


@lru_cache
def get_dataset_store() -> DatasetStore:
    return DatasetStore()
