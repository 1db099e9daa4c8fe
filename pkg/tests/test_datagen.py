import math

import numpy as np
import pytest
from scipy.special import expit

from src.management.exceptions import DataError
from src.services.datagen.dataset_service import DatasetStore, generate_dataset
from src.services.datagen.kernels import default_distortion_kernel, identity_kernel
from src.services.datagen.mixing import minmax_scale, mix, sigmoid_field
from src.services.datagen.schemas import MixingConfig, ShapeKind, ShapeSpec, SourceImage
from src.services.datagen.shapes import downsample_bilinear, render_shape


def _image(pixels, role=ShapeKind.TRIANGLE) -> SourceImage:
    return SourceImage(pixels=np.asarray(pixels, dtype=np.float32), role=role)


def _identity_mixing(alpha: float = 6.0) -> MixingConfig:
    return MixingConfig(alpha=alpha, kernel=identity_kernel(1).tolist(), flip_probability=0.0)


def test_render_circle_center_is_lit():
    spec = ShapeSpec(kind=ShapeKind.CIRCLE, center_x=0.5, center_y=0.5, scale=0.5)
    image = render_shape(spec, 128)
    assert image.pixels[64, 64] == 1.0
    assert image.role is ShapeKind.CIRCLE


def test_render_circle_area_matches_analytic():
    spec = ShapeSpec(kind=ShapeKind.CIRCLE, center_x=0.5, center_y=0.5, scale=0.5)
    lit = render_shape(spec, 128).pixels.sum()
    expected = math.pi * (0.25 * 128) ** 2
    assert abs(lit - expected) / expected < 0.03


def test_render_triangle_leaves_corner_dark():
    spec = ShapeSpec(kind=ShapeKind.TRIANGLE, center_x=0.5, center_y=0.5, scale=0.5)
    pixels = render_shape(spec, 128).pixels
    assert pixels[0, 0] == 0.0
    assert set(np.unique(pixels)) <= {0.0, 1.0}


def test_render_rejects_out_of_bounds_shape():
    spec = ShapeSpec(kind=ShapeKind.CIRCLE, center_x=0.1, center_y=0.5, scale=0.5)
    with pytest.raises(DataError):
        render_shape(spec, 128)


def test_render_rejects_tiny_resolution():
    spec = ShapeSpec(kind=ShapeKind.CIRCLE, center_x=0.5, center_y=0.5, scale=0.5)
    with pytest.raises(DataError):
        render_shape(spec, 4)


def test_shape_spec_scale_range():
    with pytest.raises(ValueError):
        ShapeSpec(kind=ShapeKind.CIRCLE, center_x=0.5, center_y=0.5, scale=0.7)


def test_downsample_constant_image():
    result = downsample_bilinear(_image(np.ones((128, 128))), 64)
    assert result.pixels.shape == (64, 64)
    np.testing.assert_allclose(result.pixels, 1.0, atol=1e-6)


def test_downsample_two_by_two_averages():
    result = downsample_bilinear(_image([[1, 0], [0, 1]]), 1)
    assert result.pixels.shape == (1, 1)
    assert result.pixels[0, 0] == pytest.approx(0.5, abs=1e-6)


def test_downsample_same_size_is_identity():
    pixels = np.random.default_rng(0).random((16, 16)).astype(np.float32)
    result = downsample_bilinear(_image(pixels), 16)
    np.testing.assert_array_equal(result.pixels, pixels)


def test_downsample_rejects_upsampling():
    with pytest.raises(DataError):
        downsample_bilinear(_image(np.zeros((8, 8))), 16)


@pytest.mark.parametrize(
    "values, expected",
    [
        ([0.0, 0.5, 1.0], [0.0, 0.5, 1.0]),
        ([2, 4, 6], [0.0, 0.5, 1.0]),
        ([3, 3, 3], [0.0, 0.0, 0.0]),
    ],
)
def test_minmax_scale(values, expected):
    np.testing.assert_allclose(minmax_scale(values), expected)


def test_minmax_scale_is_idempotent():
    x = np.random.default_rng(3).normal(size=(10, 10))
    once = minmax_scale(x)
    np.testing.assert_allclose(minmax_scale(once), once)


def test_mix_of_empty_sources_is_zero():
    zeros = _image(np.zeros((16, 16)))
    sample = mix(zeros, _image(np.zeros((16, 16)), ShapeKind.CIRCLE), MixingConfig())
    np.testing.assert_array_equal(sample.mixture, 0.0)


def test_mix_overlap_barely_brighter_than_single_coverage():
    assert expit(6.0) == pytest.approx(0.9975, abs=1e-4)
    assert expit(3.0) == pytest.approx(0.9526, abs=1e-4)

    tri = np.zeros((8, 8))
    circ = np.zeros((8, 8))
    tri[:, :4] = 1.0
    circ[:, 2:6] = 1.0
    field = sigmoid_field(_image(tri), _image(circ, ShapeKind.CIRCLE), alpha=6.0)
    overlap, single = field[0, 3], field[0, 0]
    assert overlap == pytest.approx(1.0)
    assert single == pytest.approx((expit(3.0) - 0.5) / (expit(6.0) - 0.5))
    assert overlap - single < 0.1


def test_mix_with_identity_kernel():
    tri = np.zeros((16, 16))
    tri[4:10, 4:10] = 1.0
    sample = mix(_image(tri), _image(np.zeros((16, 16)), ShapeKind.CIRCLE), _identity_mixing())
    expected = minmax_scale(expit(3.0 * tri))
    np.testing.assert_allclose(sample.mixture, expected, atol=1e-6)


def test_mix_rejects_mismatched_sources():
    with pytest.raises(DataError):
        mix(_image(np.zeros((8, 8))), _image(np.zeros((16, 16)), ShapeKind.CIRCLE), MixingConfig())


def test_sharp_sigmoid_approaches_binary_union():
    rng = np.random.default_rng(5)
    tri = (rng.random((32, 32)) > 0.5).astype(np.float32)
    circ = (rng.random((32, 32)) > 0.5).astype(np.float32)
    field = sigmoid_field(_image(tri), _image(circ, ShapeKind.CIRCLE), alpha=100.0)
    union = np.maximum(tri, circ)
    np.testing.assert_allclose(field, union, atol=1e-3)


def test_default_kernel_is_normalized_and_flippable():
    kernel = default_distortion_kernel()
    assert kernel.shape == (7, 7)
    assert kernel.sum() == pytest.approx(1.0)
    assert kernel[3, 3] > kernel[5, 5] > kernel[1, 1]
    with pytest.raises(ValueError):
        MixingConfig(kernel=[[0.5, 0.5], [0.0, 0.0]])


def test_generate_dataset_split_and_range(tiny_dataset):
    assert len(tiny_dataset.train) == 32
    assert len(tiny_dataset.test) == 8
    for subset in (tiny_dataset.train, tiny_dataset.test):
        assert subset.mixtures.min() >= 0.0 and subset.mixtures.max() <= 1.0
        assert subset.sources().shape == (len(subset), 2, 16, 16)
        assert subset.triangles.min() >= 0.0 and subset.circles.max() <= 1.0


def test_generate_dataset_ten_pairs():
    split = generate_dataset(10, 16, MixingConfig(seed=2), split_fraction=0.8, threads=1)
    assert (len(split.train), len(split.test)) == (8, 2)


def test_generate_dataset_is_deterministic_across_thread_counts():
    first = generate_dataset(12, 16, MixingConfig(seed=9), threads=1)
    second = generate_dataset(12, 16, MixingConfig(seed=9), threads=4)
    np.testing.assert_array_equal(first.train.mixtures, second.train.mixtures)
    np.testing.assert_array_equal(first.test.circles, second.test.circles)
    np.testing.assert_array_equal(first.train.seeds, second.train.seeds)


def test_generate_dataset_depends_on_seed():
    first = generate_dataset(4, 16, MixingConfig(seed=1), threads=1)
    second = generate_dataset(4, 16, MixingConfig(seed=2), threads=1)
    assert not np.array_equal(first.train.mixtures, second.train.mixtures)


def test_generate_dataset_validates_arguments():
    with pytest.raises(DataError):
        generate_dataset(0, 16, MixingConfig())
    with pytest.raises(DataError):
        generate_dataset(4, 16, MixingConfig(), split_fraction=1.0)


def test_sample_view_carries_both_sources(tiny_dataset):
    sample = tiny_dataset.train[0]
    assert [source.role for source in sample.sources] == [ShapeKind.TRIANGLE, ShapeKind.CIRCLE]
    assert sample.seed == int(tiny_dataset.train.seeds[0])


def test_dataset_store_round_trip(tmp_path, tiny_dataset):
    store = DatasetStore(cache_dir=tmp_path / "cache")
    store.save(tiny_dataset, tmp_path / "data")
    loaded = store.load(tmp_path / "data")

    assert loaded.manifest.n_train == 32
    assert loaded.manifest.mixing == tiny_dataset.manifest.mixing
    np.testing.assert_array_equal(loaded.train.mixtures, tiny_dataset.train.mixtures)
    np.testing.assert_array_equal(loaded.test.triangles, tiny_dataset.test.triangles)
    np.testing.assert_array_equal(loaded.test.seeds, tiny_dataset.test.seeds)
    assert (tmp_path / "data" / "train_mixtures.f32").stat().st_size == 32 * 16 * 16 * 4


def test_dataset_store_files_are_bit_identical_across_runs(tmp_path):
    store = DatasetStore(cache_dir=tmp_path / "cache")
    for name in ("a", "b"):
        store.save(generate_dataset(6, 16, MixingConfig(seed=4), threads=2), tmp_path / name)
    for file_name in ("manifest.json", "train_mixtures.f32", "test_circles.f32"):
        assert (tmp_path / "a" / file_name).read_bytes() == (tmp_path / "b" / file_name).read_bytes()


def test_dataset_store_cache_hit(tmp_path):
    store = DatasetStore(cache_dir=tmp_path)
    split, location = store.resolve(6, 16, MixingConfig(seed=3), threads=1)
    again, same_location = store.resolve(6, 16, MixingConfig(seed=3), threads=1)
    assert location == same_location
    assert location.parent == tmp_path
    np.testing.assert_array_equal(split.train.mixtures, again.train.mixtures)


def test_dataset_store_missing_manifest(tmp_path):
    with pytest.raises(DataError):
        DatasetStore(cache_dir=tmp_path).load(tmp_path / "nowhere")
