from dataclasses import dataclass

import numpy as np

QUADRATURE_SEGMENTS = 1024


@dataclass(frozen=True)
class ArchCurve:
    """y(x) = depth * (1 - (2|x| / width)^2)^exponent on [-width/2, width/2]."""
    width: float = 0.9
    depth: float = 0.45
    exponent: float = 0.8

    def __post_init__(self):
        if not (self.width > 0 and self.depth > 0 and self.exponent > 0):
            raise ValueError('Arch width, depth and exponent must be positive')


def _points(curve, t):
    t = np.asarray(t, dtype=np.float64)
    x = (t - 0.5) * curve.width
    base = np.clip(1.0 - (2.0 * np.abs(x) / curve.width) ** 2, 0.0, None)
    return x, curve.depth * base ** curve.exponent


def arch_point(curve, t):
    """(x, y) of the arch at parameter t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError('Arch parameter must lie in [0, 1], got {}'.format(t))
    x, y = _points(curve, t)
    return float(x), float(y)


class JawLayout:
    """Slots at equal arc length along an arch, with their points and tangent angles."""

    def __init__(self, curve, t, points, tangents):
        self.curve = curve
        self.t = t
        self.points = points
        self.tangents = tangents
        self.angles = np.arctan2(tangents[:, 1], tangents[:, 0])

    def __len__(self):
        return len(self.t)

    def slot_transform(self, slot, jaw_offset=0.5, upper=False):
        """Rotation and translation carrying the canonical tooth frame to a slot.

        Canonical +x (toward the crown) goes to world +z and canonical z to
        the arch tangent; the tooth sits at (x, y, -jaw_offset). The upper
        jaw is the mirror image in z, so its transform has determinant -1.
        """
        base = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])
        theta = self.angles[slot]
        spin = np.array([[np.cos(theta), -np.sin(theta), 0.0],
                         [np.sin(theta), np.cos(theta), 0.0],
                         [0.0, 0.0, 1.0]])
        rotation = spin @ base
        translation = np.array([self.points[slot, 0], self.points[slot, 1], -jaw_offset])
        if upper:
            mirror = np.diag([1.0, 1.0, -1.0])
            rotation, translation = mirror @ rotation, mirror @ translation
        return rotation, translation


def layout_slots(curve, n=16, segments=QUADRATURE_SEGMENTS):
    """n slots at arc-length fractions (i + 0.5) / n of a piecewise-linear arch."""
    if n < 1:
        raise ValueError('A jaw needs at least one slot, got {}'.format(n))
    ts = np.linspace(0.0, 1.0, segments + 1)
    xs, ys = _points(curve, ts)
    lengths = np.hypot(np.diff(xs), np.diff(ys))
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    targets = (np.arange(n) + 0.5) / n * cumulative[-1]
    t = np.interp(targets, cumulative, ts)
    x, y = _points(curve, t)
    delta = 1.0 / segments
    xa, ya = _points(curve, np.clip(t + delta, 0.0, 1.0))
    xb, yb = _points(curve, np.clip(t - delta, 0.0, 1.0))
    tangents = np.stack([xa - xb, ya - yb], axis=1)
    tangents /= np.linalg.norm(tangents, axis=1)[:, np.newaxis]
    return JawLayout(curve, t, np.stack([x, y], axis=1), tangents)
