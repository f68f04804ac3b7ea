"""Surface layout, scenario coordinates and receiver trajectories.

The reflective surface is a planar grid of binary-switching elements
assembled from identical modules. All positions live in the surface
frame: origin at the surface center, x rightward along the surface,
y upward, z along the broadside normal. Antenna positions are given
in polar scenario coordinates (distance from the surface center and
azimuth angle off broadside, positive toward +x).
"""

import numpy as np
from dataclasses import dataclass


@dataclass(frozen=True)
class RisLayout:
    """Module grid and module dimensions of the surface.

    The default describes twelve 360 x 247 mm modules of 16 x 16
    elements mounted edge to edge in three columns and four rows.
    """

    modules_x: int = 3
    modules_y: int = 4
    elems_per_module_x: int = 16
    elems_per_module_y: int = 16
    module_width: float = 0.360
    module_height: float = 0.247

    def __post_init__(self):
        counts = (self.modules_x, self.modules_y,
                  self.elems_per_module_x, self.elems_per_module_y)
        if any(int(c) != c or c < 1 for c in counts):
            raise ValueError(f"layout counts must be positive integers, got {counts}")
        if self.module_width <= 0 or self.module_height <= 0:
            raise ValueError("module dimensions must be positive")

    @property
    def element_count(self):
        return (self.modules_x * self.modules_y
                * self.elems_per_module_x * self.elems_per_module_y)

    @property
    def columns(self):
        """Total element columns across the surface."""
        return self.modules_x * self.elems_per_module_x

    @property
    def rows(self):
        """Total element rows across the surface."""
        return self.modules_y * self.elems_per_module_y

    @property
    def width(self):
        return self.modules_x * self.module_width

    @property
    def height(self):
        return self.modules_y * self.module_height


class RisGeometry:
    """Element positions of a built surface.

    ``element_positions`` is an (M, 3) array in the surface frame with
    z = 0 for every element and the centroid at the origin. Element
    order is row-major over modules, then row-major within each module
    (top-left element first, scanning left to right, top to bottom).
    """

    def __init__(self, element_positions, layout):
        pos = np.asarray(element_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("element_positions must be an (M, 3) array")
        if pos.shape[0] != layout.element_count:
            raise ValueError("position count does not match layout")
        if np.any(pos[:, 2] != 0.0):
            raise ValueError("surface elements must lie in the z = 0 plane")
        if np.any(np.abs(pos.mean(axis=0)) > 1e-9):
            raise ValueError("element centroid must be at the origin")
        self.element_positions = pos
        self.layout = layout

    @property
    def element_count(self):
        return self.element_positions.shape[0]


@dataclass(frozen=True)
class PolarPoint:
    """Antenna position: distance from the surface center, azimuth in
    degrees (0 = broadside, positive toward +x) and height in meters."""

    distance: float
    angle: float
    height: float = 0.0

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"distance must be positive, got {self.distance}")
        if not -90.0 < self.angle < 90.0:
            raise ValueError(f"angle must lie in (-90, 90) degrees, got {self.angle}")


@dataclass(frozen=True)
class TrajectorySpec:
    """Linear polar motion: constant radial and angular speeds from a
    start point, sampled at a fixed rate for a fixed duration."""

    start: PolarPoint
    radial_speed: float = 0.05
    angular_speed: float = 5.0
    duration: float = 10.0
    sample_rate: float = 10.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")


def build_geometry(layout=None):
    """Construct element positions for a layout.

    Modules abut with zero gap, so the element pitch is the module
    dimension divided by the per-module element count and the grid is
    uniform across the whole surface. Element centers sit half a pitch
    inside the surface edges.
    """
    if layout is None:
        layout = RisLayout()
    pitch_x = layout.module_width / layout.elems_per_module_x
    pitch_y = layout.module_height / layout.elems_per_module_y
    width = layout.width
    height = layout.height

    xs = np.empty(layout.element_count)
    ys = np.empty(layout.element_count)
    i = 0
    for mrow in range(layout.modules_y):
        for mcol in range(layout.modules_x):
            for erow in range(layout.elems_per_module_y):
                gy = mrow * layout.elems_per_module_y + erow
                for ecol in range(layout.elems_per_module_x):
                    gx = mcol * layout.elems_per_module_x + ecol
                    xs[i] = (gx + 0.5) * pitch_x - width / 2.0
                    ys[i] = height / 2.0 - (gy + 0.5) * pitch_y
                    i += 1
    pos = np.column_stack([xs, ys, np.zeros_like(xs)])
    # the half-pitch inset makes the grid symmetric, so the centroid is
    # exactly the origin up to float summation error; snap it out
    pos[:, 0] -= pos[:, 0].mean()
    pos[:, 1] -= pos[:, 1].mean()
    return RisGeometry(pos, layout)


def polar_to_cartesian(p):
    """Map a PolarPoint to (x, y, z) in the surface frame."""
    a = np.radians(p.angle)
    return np.array([p.distance * np.sin(a), p.height, p.distance * np.cos(a)])


def element_distances(geom, point):
    """Euclidean distance from a 3-D point to every element, in element
    index order. Raises for points coinciding with an element."""
    point = np.asarray(point, dtype=float)
    d = np.linalg.norm(geom.element_positions - point[None, :], axis=1)
    if np.any(d < 1e-12):
        raise ValueError("query point coincides with a surface element")
    return d


def sample_trajectory(spec):
    """Sample the trajectory at k / sample_rate for k = 0, 1, ...

    Returns a list of (time, PolarPoint). A trajectory that leaves the
    valid polar domain (distance <= 0 or |angle| >= 90) raises.
    """
    n = int(np.floor(spec.duration * spec.sample_rate + 1e-9)) + 1
    out = []
    for k in range(n):
        t = k / spec.sample_rate
        d = spec.start.distance + spec.radial_speed * t
        a = spec.start.angle + spec.angular_speed * t
        try:
            p = PolarPoint(d, a, spec.start.height)
        except ValueError as e:
            raise ValueError(f"trajectory leaves the valid domain at t={t}: {e}")
        out.append((t, p))
    return out
