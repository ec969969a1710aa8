import numpy as np

from ..conditioning import PATCH_SIZE, PatchImage, extract_patch
from ..conditioning.patch import _resample

RAY_STEPS = 128
SCENE_RESOLUTION = 128


def _centres(n):
    return -0.5 + (np.arange(n) + 0.5) / n


def render_projection(oracle, resolution=PATCH_SIZE, steps=RAY_STEPS):
    """Parallel projection of an oracle along +y.

    Pixel (i, k) is the fraction of `steps` samples along the ray through
    (x_i, z_k) that fall inside the shape, then the whole image is divided
    by its maximum. An empty shape gives an all-zero image.
    """
    xs = _centres(resolution)
    ys = _centres(steps)
    zs = _centres(resolution)
    image = np.zeros((resolution, resolution))
    gy, gz = np.meshgrid(ys, zs, indexing='ij')
    for i, x in enumerate(xs):
        points = np.stack([np.full(gy.size, x), gy.ravel(), gz.ravel()], axis=1)
        image[i] = oracle(points).reshape(steps, resolution).mean(axis=0)
    peak = image.max()
    return image / peak if peak > 0 else image


def render_patch(oracle, resolution=PATCH_SIZE):
    """The whole-cube projection as a 64x64 PatchImage."""
    image = render_projection(oracle, resolution)
    if resolution != PATCH_SIZE:
        image = np.clip(_resample(image, PATCH_SIZE), 0.0, 1.0)
    return PatchImage(image)


def tooth_patch(oracle, resolution=SCENE_RESOLUTION):
    """Patch cropped to the tooth silhouette, as extract_patch cuts it out of a scene."""
    image = render_projection(oracle, resolution)
    return extract_patch(image, (image > 0).astype(np.float64))
