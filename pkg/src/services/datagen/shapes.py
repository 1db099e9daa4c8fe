import numpy as np
from PIL import Image, ImageDraw

from src.management.exceptions import DataError
from src.services.datagen.schemas import ShapeKind, ShapeSpec, SourceImage

MIN_RESOLUTION = 8


def render_shape(spec: ShapeSpec, resolution: int) -> SourceImage:
    """Rasterize one binary shape (interior 1.0, background 0.0)."""
    if resolution < MIN_RESOLUTION:
        raise DataError(f"Resolution must be at least {MIN_RESOLUTION}, got {resolution}")
    if not spec.fits():
        raise DataError(f"{spec.kind.value} at ({spec.center_x:.3f}, {spec.center_y:.3f}) "
                        f"with scale {spec.scale:.3f} exceeds the image bounds")

    canvas = Image.new("L", (resolution, resolution), color=0)
    draw = ImageDraw.Draw(canvas)
    x0, y0, x1, y1 = (coord * resolution for coord in spec.bounding_box())

    if spec.kind is ShapeKind.CIRCLE:
        draw.ellipse((x0, y0, x1 - 1, y1 - 1), fill=255)
    else:
        apex = ((x0 + x1) / 2.0, y0)
        draw.polygon([apex, (x0, y1 - 1), (x1 - 1, y1 - 1)], fill=255)

    pixels = np.asarray(canvas, dtype=np.float32) / 255.0
    return SourceImage(pixels=pixels, role=spec.kind)


def downsample_bilinear(img: SourceImage, target: int) -> SourceImage:
    source = img.resolution
    if target < 1:
        raise DataError(f"Target resolution must be positive, got {target}")
    if target > source:
        raise DataError(f"Cannot downsample {source}px to a larger {target}px")
    if target == source:
        return SourceImage(pixels=img.pixels.astype(np.float32, copy=True), role=img.role)

    field = Image.fromarray(np.ascontiguousarray(img.pixels, dtype=np.float32))
    resized = field.resize((target, target), Image.Resampling.BILINEAR)
    pixels = np.clip(np.asarray(resized, dtype=np.float32), 0.0, 1.0)
    return SourceImage(pixels=pixels, role=img.role)
