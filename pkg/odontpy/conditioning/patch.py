import logging

import numpy as np
from scipy.ndimage import map_coordinates

from ..exceptions import DimensionError, EmptyMaskError, NumericError, PatchError

PATCH_SIZE = 64


class PatchImage:
    """Square grayscale tooth patch with intensities in [0, 1]."""

    def __init__(self, pixels):
        pixels = np.array(pixels, dtype=np.float64)
        if pixels.shape != (PATCH_SIZE, PATCH_SIZE):
            raise DimensionError('Patch must be {0}x{0}, got {1}'.format(PATCH_SIZE, pixels.shape))
        if not np.all(np.isfinite(pixels)):
            raise NumericError('Patch contains non-finite pixels')
        if pixels.min() < 0.0 or pixels.max() > 1.0:
            raise PatchError('Patch pixels must lie in [0, 1]')
        self.pixels = pixels

    def __eq__(self, other):
        return isinstance(other, PatchImage) and np.array_equal(self.pixels, other.pixels)


def _resample(canvas, size):
    """Bilinear resampling of a square canvas onto size x size pixel centres."""
    side = canvas.shape[0]
    src = (np.arange(size) + 0.5) * side / size - 0.5
    rows, cols = np.meshgrid(src, src, indexing='ij')
    return map_coordinates(canvas, [rows, cols], order=1, mode='nearest')


def extract_patch(px_image, seg_channel, threshold=0.5, size=PATCH_SIZE):
    """Crop one tooth out of a radiograph using its segmentation channel.

    The channel is thresholded into a mask, the mask is ANDed with the image,
    and the mask's bounding box, grown to a centred square, is resampled to
    a size x size patch. Parts of the square outside the image are zeros.
    """
    px = np.asarray(px_image, dtype=np.float64)
    seg = np.asarray(seg_channel, dtype=np.float64)
    if px.ndim != 2 or px.shape != seg.shape:
        raise DimensionError('Image {} and segmentation channel {} must be matching 2D arrays'.format(px.shape, seg.shape))
    if not 0.0 < threshold < 1.0:
        raise ValueError('threshold must lie strictly between 0 and 1, got {}'.format(threshold))

    mask = seg >= threshold
    if not mask.any():
        raise EmptyMaskError('No pixel reaches threshold {}'.format(threshold))
    masked = np.where(mask, px, 0.0)

    rows = np.nonzero(mask.any(axis=1))[0]
    cols = np.nonzero(mask.any(axis=0))[0]
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    side = max(r1 - r0, c1 - c0)
    top = r0 - (side - (r1 - r0)) // 2
    left = c0 - (side - (c1 - c0)) // 2

    canvas = np.zeros((side, side))
    sr0, sr1 = max(top, 0), min(top + side, px.shape[0])
    sc0, sc1 = max(left, 0), min(left + side, px.shape[1])
    canvas[sr0 - top:sr1 - top, sc0 - left:sc1 - left] = masked[sr0:sr1, sc0:sc1]
    logging.debug('Patch crop {}x{} at ({}, {})'.format(side, side, top, left))
    return PatchImage(np.clip(_resample(canvas, size), 0.0, 1.0))


def write_pgm(path, pixels):
    """Write [0,1] intensities as an 8-bit binary portable graymap."""
    pixels = np.asarray(pixels.pixels if isinstance(pixels, PatchImage) else pixels, dtype=np.float64)
    data = np.round(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    with open(path, 'wb') as f:
        f.write('P5\n{} {}\n255\n'.format(data.shape[1], data.shape[0]).encode('ascii'))
        f.write(data.tobytes())


def read_pgm(path):
    """Read a binary (P5) portable graymap into [0,1] floats."""
    with open(path, 'rb') as f:
        content = f.read()
    tokens = []
    position = 0
    while len(tokens) < 4:
        while position < len(content) and content[position:position + 1].isspace():
            position += 1
        if content[position:position + 1] == b'#':
            while position < len(content) and content[position:position + 1] not in (b'\n', b'\r'):
                position += 1
            continue
        start = position
        while position < len(content) and not content[position:position + 1].isspace():
            position += 1
        if start == position:
            raise PatchError('Truncated PGM header in {}'.format(path))
        tokens.append(content[start:position])
    if tokens[0] != b'P5':
        raise PatchError('{} is not a binary PGM file'.format(path))
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise PatchError('Non-numeric PGM header in {}'.format(path))
    if not 0 < maxval < 256:
        raise PatchError('Only 8-bit PGM files are supported')
    raster = content[position + 1:position + 1 + width * height]
    if len(raster) != width * height:
        raise PatchError('Truncated PGM raster in {}'.format(path))
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.float64) / maxval
