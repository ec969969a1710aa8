import logging

import numpy as np

from ..conditioning import NUM_CLASSES, ToothClass
from ..exceptions import InvalidClassError
from .render import render_projection
from .tooth import ToothShapeOracle, generate_tooth

SCENE_HEIGHT = 256
SCENE_WIDTH = 768
SLOTS_PER_JAW = 16
SLOT_WIDTH = SCENE_WIDTH // SLOTS_PER_JAW
DEFAULT_FOOTPRINT = 128


def scene_slot(tooth_class):
    """Column slot of a class: upper 1..16 left to right, lower 32..17 left to right."""
    index = ToothClass(tooth_class).index
    return index - 1 if index <= SLOTS_PER_JAW else NUM_CLASSES - index


def _paste(canvas, image, top, left):
    h, w = image.shape
    r0, r1 = max(top, 0), min(top + h, canvas.shape[0])
    c0, c1 = max(left, 0), min(left + w, canvas.shape[1])
    if r0 < r1 and c0 < c1:
        canvas[r0:r1, c0:c1] += image[r0 - top:r1 - top, c0 - left:c1 - left]


def make_scene(specs, footprint=DEFAULT_FOOTPRINT):
    """Synthetic panoramic image and 33-channel segmentation map.

    Each tooth is projected at `footprint` pixels per cube side and pasted
    at its slot, upper teeth in the top half with crowns down, lower teeth
    in the bottom half with crowns up. Channel k holds the silhouette of
    class k, channel 0 the pixels no tooth covers.

    Returns
    -------
    (numpy.ndarray [256, 768] in [0, 1], numpy.ndarray uint8 [33, 256, 768])
    """
    seen = set()
    for spec in specs:
        if spec.tooth_class in seen:
            raise InvalidClassError('Class {} appears twice in the scene'.format(spec.tooth_class))
        seen.add(spec.tooth_class)

    half = SCENE_HEIGHT // 2
    intensity = np.zeros((SCENE_HEIGHT, SCENE_WIDTH))
    seg_map = np.zeros((NUM_CLASSES + 1, SCENE_HEIGHT, SCENE_WIDTH), dtype=np.uint8)
    for spec in specs:
        projection = render_projection(ToothShapeOracle(spec), footprint)
        left = scene_slot(spec.tooth_class) * SLOT_WIDTH + SLOT_WIDTH // 2 - footprint // 2
        if spec.tooth_class <= SLOTS_PER_JAW:
            image, top = projection, half - footprint
        else:
            image, top = projection[::-1], half
        silhouette = np.zeros((SCENE_HEIGHT, SCENE_WIDTH))
        _paste(silhouette, (image > 0).astype(np.float64), top, left)
        _paste(intensity, image, top, left)
        seg_map[spec.tooth_class] = silhouette > 0
    seg_map[0] = ~seg_map[1:].any(axis=0)
    peak = intensity.max()
    if peak > 0:
        intensity /= peak
    logging.debug('Scene with %d teeth', len(specs))
    return intensity, seg_map


def synthesize_scene(classes, seed, footprint=DEFAULT_FOOTPRINT):
    """Generate one tooth per class with the given seed and render them together."""
    specs = [generate_tooth(c, seed)[0] for c in classes]
    px_image, seg_map = make_scene(specs, footprint)
    return specs, px_image, seg_map
