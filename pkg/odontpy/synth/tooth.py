"""Procedural teeth in the canonical frame.

The long axis is +x with the crown toward +x, the projection axis is +y and
the mesio-distal width runs along z. A tooth is a superellipsoid crown with
one to three tapered cone roots hanging toward -x.
"""
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np

from ..conditioning import ToothClass
from ..conditioning.classes import CANINE, INCISOR, MOLAR, PREMOLAR
from .oracle import ShapeOracle

JITTER = 0.15
CROWN_TOP = 0.45
APEX_LIMIT = -0.45

# semi-axes and squareness of the crown, base radius and length of a root
FAMILY_DEFAULTS = {
    INCISOR: dict(ax=0.17, ay=0.06, az=0.11, e1=0.6, e2=0.8, root_radius=0.05, root_length=0.5),
    CANINE: dict(ax=0.19, ay=0.08, az=0.10, e1=0.7, e2=0.9, root_radius=0.06, root_length=0.58),
    PREMOLAR: dict(ax=0.15, ay=0.10, az=0.12, e1=0.5, e2=0.7, root_radius=0.045, root_length=0.45),
    MOLAR: dict(ax=0.15, ay=0.17, az=0.15, e1=0.4, e2=0.6, root_radius=0.05, root_length=0.42),
}

_ROOT_WIDTH = {1: 1.0, 2: 0.8, 3: 0.75}


def root_count(tooth_class):
    """Roots per class: upper molars 3, lower molars 2, upper first premolars 2, all others 1."""
    index = ToothClass(tooth_class).index
    if index in (1, 2, 3, 14, 15, 16):
        return 3
    if index in (17, 18, 19, 30, 31, 32, 5, 12):
        return 2
    return 1


@dataclass(frozen=True)
class CrownShape:
    center_x: float
    ax: float
    ay: float
    az: float
    e1: float
    e2: float


@dataclass(frozen=True)
class RootCone:
    offset_y: float
    offset_z: float
    base_x: float
    radius: float
    length: float

    @property
    def apex_x(self):
        return self.base_x - self.length


@dataclass(frozen=True)
class ToothSpec:
    tooth_class: int
    crown: CrownShape
    roots: Tuple[RootCone, ...]
    seed: int

    def to_dict(self):
        return asdict(self)


class ToothShapeOracle(ShapeOracle):
    """Union of the crown superellipsoid and the root cones of a ToothSpec."""

    def __init__(self, spec):
        self.spec = spec

    def _inside(self, points):
        crown = self.spec.crown
        dx = np.abs((points[:, 0] - crown.center_x) / crown.ax)
        dy = np.abs(points[:, 1] / crown.ay)
        dz = np.abs(points[:, 2] / crown.az)
        inside = (dx ** (2.0 / crown.e2) + dy ** (2.0 / crown.e2)) ** (crown.e2 / crown.e1) \
            + dz ** (2.0 / crown.e1) <= 1.0
        for root in self.spec.roots:
            along = points[:, 0] - root.apex_x
            rho = np.hypot(points[:, 1] - root.offset_y, points[:, 2] - root.offset_z)
            inside |= (along >= 0.0) & (points[:, 0] <= root.base_x) & (rho <= root.radius * along / root.length)
        return inside


def _root_offsets(count, ay, az):
    if count == 1:
        return [(0.0, 0.0)]
    if count == 2:
        return [(0.0, -0.45 * az), (0.0, 0.45 * az)]
    return [(-0.4 * ay, -0.45 * az), (-0.4 * ay, 0.45 * az), (0.5 * ay, 0.0)]


def generate_tooth(tooth_class, seed):
    """Deterministic (ToothSpec, ToothShapeOracle) for a class and seed.

    Every family default is scaled by an independent factor in [0.85, 1.15].
    """
    tooth_class = ToothClass(tooth_class)
    rng = np.random.default_rng([int(seed), tooth_class.index])
    base = FAMILY_DEFAULTS[tooth_class.family]
    keys = ('ax', 'ay', 'az', 'e1', 'e2', 'root_radius', 'root_length')
    factors = rng.uniform(1.0 - JITTER, 1.0 + JITTER, size=len(keys))
    p = {key: base[key] * factor for key, factor in zip(keys, factors)}

    crown = CrownShape(center_x=CROWN_TOP - p['ax'], ax=p['ax'], ay=p['ay'], az=p['az'], e1=p['e1'], e2=p['e2'])
    count = root_count(tooth_class)
    base_x = crown.center_x - 0.5 * crown.ax
    length = min(p['root_length'], base_x - APEX_LIMIT)
    radius = p['root_radius'] * _ROOT_WIDTH[count]
    roots = tuple(RootCone(offset_y=oy, offset_z=oz, base_x=base_x, radius=radius, length=length)
                  for oy, oz in _root_offsets(count, crown.ay, crown.az))
    spec = ToothSpec(tooth_class=tooth_class.index, crown=crown, roots=roots, seed=int(seed))
    return spec, ToothShapeOracle(spec)
