import logging

import numpy as np

from ..conditioning import PatchImage, ToothClass, extract_patch
from ..exceptions import EmptyMaskError, InvalidClassError
from ..meshing import concatenate_meshes, eval_grid, extract_mesh
from .arch import ArchCurve, layout_slots

UPPER = 'upper'
LOWER = 'lower'
JAW_SIZE = 16


def jaw_slot(tooth_class, jaw):
    """Slot of a class in its jaw: upper 1..16 -> 0..15, lower 32..17 -> 0..15."""
    index = ToothClass(tooth_class).index
    if jaw == UPPER and index <= JAW_SIZE:
        return index - 1
    if jaw == LOWER and index > JAW_SIZE:
        return 2 * JAW_SIZE - index
    raise InvalidClassError('Class {} does not belong to the {} jaw'.format(index, jaw))


def place_teeth(meshes, layout, jaw, jaw_offset=0.5):
    """Move each (class, mesh) to its slot and concatenate them in class order.

    Parameters
    ----------
    meshes : dict or list of (int, TriangleMesh)
        Per-class meshes in the canonical tooth frame.
    layout : JawLayout
    jaw : {'upper', 'lower'}
    jaw_offset : float
        Distance of the tooth frame origin from the occlusal plane z = 0.
    """
    if jaw not in (UPPER, LOWER):
        raise ValueError("jaw must be 'upper' or 'lower', got {!r}".format(jaw))
    items = sorted(dict(meshes).items())
    if len(items) > JAW_SIZE:
        raise InvalidClassError('At most {} teeth per jaw'.format(JAW_SIZE))
    placed = []
    for tooth_class, mesh in items:
        rotation, translation = layout.slot_transform(jaw_slot(tooth_class, jaw), jaw_offset, upper=jaw == UPPER)
        moved = mesh.transformed(rotation, translation)
        if np.linalg.det(rotation) < 0:
            moved = moved.flipped()
        placed.append(moved)
    logging.debug('Placed %d teeth in the %s jaw', len(placed), jaw)
    return concatenate_meshes(placed)


def assemble_jaws(meshes, curve=None, jaw_offset=0.5):
    """Both jaws from one class -> mesh mapping, upper first."""
    curve = curve or ArchCurve()
    layout = layout_slots(curve, JAW_SIZE)
    upper = {c: m for c, m in meshes.items() if ToothClass(c).jaw == UPPER}
    lower = {c: m for c, m in meshes.items() if ToothClass(c).jaw == LOWER}
    return concatenate_meshes([place_teeth(upper, layout, UPPER, jaw_offset),
                               place_teeth(lower, layout, LOWER, jaw_offset)])


def reconstruct_scene(reconstructor, px_image, seg_map, classes=None, resolution=128, iso=0.5, threshold=0.5):
    """Reconstruct every segmented tooth of a radiograph.

    Each class channel is cropped with extract_patch and turned into a
    mesh; channels without a mask and empty reconstructions are skipped
    with a warning. Returns {class: TriangleMesh}.
    """
    seg_map = np.asarray(seg_map)
    if classes is None:
        classes = [k for k in range(1, seg_map.shape[0]) if np.any(seg_map[k] >= threshold)]
    meshes = {}
    for tooth_class in classes:
        tooth_class = ToothClass(tooth_class).index
        try:
            patch = extract_patch(px_image, seg_map[tooth_class], threshold)
        except EmptyMaskError:
            logging.warning('Class %d has no segmentation mask, skipped', tooth_class)
            continue
        if ToothClass(tooth_class).jaw == LOWER:
            # lower teeth sit crown up in the scene
            patch = PatchImage(patch.pixels[::-1])
        c = reconstructor.condition(tooth_class, patch)
        mesh = extract_mesh(eval_grid(reconstructor, c, resolution), iso)
        if mesh.is_empty:
            logging.warning('Class %d reconstructed to an empty mesh, skipped', tooth_class)
            continue
        logging.info('Class %d: %d vertices, %d faces', tooth_class, len(mesh.vertices), len(mesh.faces))
        meshes[tooth_class] = mesh
    return meshes
