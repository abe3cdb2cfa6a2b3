"""Exact signed distances for primitive shapes, CSG composition, and initial data.

Shapes are small immutable CSG trees. Signed distances are exact for the
primitives (negative inside), unions take the pointwise min, and the xor
combinator (symmetric difference, for "cut by a line/plane" scenes) acts at
the phase-field level: u = u_A + u_B - 2 u_A u_B, which puts a correct
transition profile across every interface of the two-phase configuration.

Initial data follows u0 = q(d/eps). The chemical potential is not seeded
from the closed form -(1/eps) Delta d q'(d/eps): CSG shapes have kinks in
Delta d along medial axes, so mu0 is produced by the constitutive relation
mu = W'(u0)/eps^2 - Delta u0 with the spectral Laplacian, which agrees with
the closed form to O(eps) near the interface and is defined everywhere.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import PeriodicGrid, laplacian
from .profiles import profile_q, well

__all__ = [
    "Shape",
    "Ball",
    "Torus",
    "Cylinder",
    "Slab",
    "Halfspace",
    "Box",
    "Union",
    "Xor",
    "signed_distance",
    "phase_field",
    "InitPair",
    "init_fields",
    "closed_form_mu0",
    "builtin_scene",
    "SCENE_NAMES",
]


class Shape:
    """Base CSG node; subclasses implement sdf(x) on stacked coordinates."""

    def sdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds_radius(self, center: np.ndarray) -> float | None:
        """Max distance of the boundary from `center`, None if unbounded."""
        return None

    def sdf_laplacian(self, x: np.ndarray) -> np.ndarray | None:
        """Pointwise Laplacian of the signed distance, None if unavailable.

        Evaluated per piece (medial-axis kinks carry no distributional
        part), which is what the closed-form initial chemical potential
        needs; pieces where Delta d is genuinely unknown return None and
        the caller falls back to the constitutive relation.
        """
        return None


def _wrap(rel: np.ndarray) -> np.ndarray:
    """Center-relative coordinates folded to the nearest periodic image.

    Bounded primitives measure distance on the unit torus, which keeps
    init_fields exactly equivariant under whole-cell translations and the
    far field consistent across the box seam.
    """
    return rel - np.round(rel)


@dataclass(frozen=True)
class Ball(Shape):
    """Circle (2D) or sphere (3D): |x - c| - R."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def sdf(self, x):
        c = np.asarray(self.center).reshape((-1,) + (1,) * (x.ndim - 1))
        rel = _wrap(x - c)
        return np.sqrt(np.sum(rel * rel, axis=0)) - self.radius

    def sdf_laplacian(self, x):
        c = np.asarray(self.center).reshape((-1,) + (1,) * (x.ndim - 1))
        rel = _wrap(x - c)
        r = np.sqrt(np.sum(rel * rel, axis=0))
        return (x.shape[0] - 1) / np.maximum(r, 1e-12)

    def bounds_radius(self, center):
        return float(np.linalg.norm(np.asarray(self.center) - center)) + self.radius


@dataclass(frozen=True)
class Torus(Shape):
    """Torus around `axis` (0, 1 or 2) through `center`; exact SDF."""

    center: tuple[float, float, float]
    axis: int
    major_radius: float
    minor_radius: float

    def __post_init__(self):
        if not (0 < self.minor_radius < self.major_radius):
            raise ValueError("need 0 < minor_radius < major_radius")
        if self.axis not in (0, 1, 2):
            raise ValueError("axis must be 0, 1 or 2")

    def sdf(self, x):
        c = np.asarray(self.center).reshape((-1,) + (1,) * (x.ndim - 1))
        rel = _wrap(x - c)
        h = rel[self.axis]
        in_plane = [rel[i] for i in range(3) if i != self.axis]
        rho = np.sqrt(in_plane[0] ** 2 + in_plane[1] ** 2)
        return np.sqrt((rho - self.major_radius) ** 2 + h**2) - self.minor_radius

    def sdf_laplacian(self, x):
        # distance to the core ring: Delta ell = 1/ell + (rho - R)/(rho ell)
        c = np.asarray(self.center).reshape((-1,) + (1,) * (x.ndim - 1))
        rel = _wrap(x - c)
        h = rel[self.axis]
        in_plane = [rel[i] for i in range(3) if i != self.axis]
        rho = np.sqrt(in_plane[0] ** 2 + in_plane[1] ** 2)
        ell = np.maximum(np.sqrt((rho - self.major_radius) ** 2 + h**2), 1e-12)
        return 1.0 / ell + (rho - self.major_radius) / (np.maximum(rho, 1e-12) * ell)

    def bounds_radius(self, center):
        off = float(np.linalg.norm(np.asarray(self.center) - center))
        return off + self.major_radius + self.minor_radius


@dataclass(frozen=True)
class Cylinder(Shape):
    """Infinite circular cylinder: distance to the axis line minus R."""

    point: tuple[float, ...]
    direction: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not np.linalg.norm(self.direction) > 0:
            raise ValueError("direction must be nonzero")

    def sdf(self, x):
        p = np.asarray(self.point).reshape((-1,) + (1,) * (x.ndim - 1))
        d = np.asarray(self.direction, dtype=float)
        d = d / np.linalg.norm(d)
        d = d.reshape((-1,) + (1,) * (x.ndim - 1))
        rel = x - p
        along = np.sum(rel * d, axis=0)
        perp2 = np.sum(rel * rel, axis=0) - along**2
        return np.sqrt(np.maximum(perp2, 0.0)) - self.radius

    def sdf_laplacian(self, x):
        p = np.asarray(self.point).reshape((-1,) + (1,) * (x.ndim - 1))
        d = np.asarray(self.direction, dtype=float)
        d = d / np.linalg.norm(d)
        d = d.reshape((-1,) + (1,) * (x.ndim - 1))
        rel = x - p
        along = np.sum(rel * d, axis=0)
        perp2 = np.sum(rel * rel, axis=0) - along**2
        r = np.sqrt(np.maximum(perp2, 0.0))
        return (x.shape[0] - 2) / np.maximum(r, 1e-12)


@dataclass(frozen=True)
class Slab(Shape):
    """Periodic stripe |x_axis - center| < half_width on the unit torus.

    The signed distance respects the periodic wrap (exact for half_width
    <= 1/2), so the phase field of a slab is smooth across the box seam;
    this is the building block for configurations whose interfaces span
    the whole box (flat 1D profiles, the saddle cross).
    """

    axis: int
    center: float
    half_width: float

    def __post_init__(self):
        if not 0 < self.half_width <= 0.5:
            raise ValueError("half_width must be in (0, 1/2]")

    def sdf(self, x):
        t = x[self.axis] - self.center
        t = t - np.round(t)  # wrap to [-1/2, 1/2]
        return np.abs(t) - self.half_width

    def sdf_laplacian(self, x):
        return np.zeros(x.shape[1:])


@dataclass(frozen=True)
class Halfspace(Shape):
    """Half plane/space: inside where (x - p) . n < 0."""

    point: tuple[float, ...]
    normal: tuple[float, ...]

    def sdf(self, x):
        n = np.asarray(self.normal, dtype=float)
        n = n / np.linalg.norm(n)
        p = np.asarray(self.point).reshape((-1,) + (1,) * (x.ndim - 1))
        n = n.reshape((-1,) + (1,) * (x.ndim - 1))
        return np.sum((x - p) * n, axis=0)

    def sdf_laplacian(self, x):
        return np.zeros(x.shape[1:])


@dataclass(frozen=True)
class Box(Shape):
    """Axis-aligned box given by center and half extents; exact SDF."""

    center: tuple[float, ...]
    half_extents: tuple[float, ...]

    def __post_init__(self):
        if any(h <= 0 for h in self.half_extents):
            raise ValueError("half extents must be positive")

    def sdf(self, x):
        c = np.asarray(self.center).reshape((-1,) + (1,) * (x.ndim - 1))
        h = np.asarray(self.half_extents).reshape((-1,) + (1,) * (x.ndim - 1))
        q = np.abs(_wrap(x - c)) - h
        outside = np.sqrt(np.sum(np.maximum(q, 0.0) ** 2, axis=0))
        inside = np.minimum(np.max(q, axis=0), 0.0)
        return outside + inside

    def bounds_radius(self, center):
        off = float(np.linalg.norm(np.asarray(self.center) - center))
        return off + float(np.linalg.norm(self.half_extents))


@dataclass(frozen=True)
class Union(Shape):
    parts: tuple[Shape, ...]

    def sdf(self, x):
        d = self.parts[0].sdf(x)
        for part in self.parts[1:]:
            d = np.minimum(d, part.sdf(x))
        return d

    def sdf_laplacian(self, x):
        # Delta d of the nearest part (the min kink has no pointwise trace)
        laps = [part.sdf_laplacian(x) for part in self.parts]
        if any(lap is None for lap in laps):
            return None
        dists = np.stack([part.sdf(x) for part in self.parts])
        nearest = np.argmin(dists, axis=0)[None, ...]
        return np.take_along_axis(np.stack(laps), nearest, axis=0)[0]

    def bounds_radius(self, center):
        radii = [p.bounds_radius(center) for p in self.parts]
        if any(r is None for r in radii):
            return None
        return max(radii)


@dataclass(frozen=True)
class Xor(Shape):
    """Symmetric difference; the SDF is the CSG (A u B) \\ (A n B) rule."""

    a: Shape
    b: Shape

    def sdf(self, x):
        da = self.a.sdf(x)
        db = self.b.sdf(x)
        return np.maximum(np.minimum(da, db), -np.maximum(da, db))


def signed_distance(shape: Shape, x) -> np.ndarray:
    """Signed distance of `shape` at stacked coordinates x of shape (dims, ...).

    Exact for primitives; min-composed for unions; xor uses the max/min CSG
    rule (exact away from overlapping boundaries).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return shape.sdf(x.reshape(-1, 1))[0]
    return shape.sdf(x)


def phase_field(shape: Shape, x: np.ndarray, eps: float) -> np.ndarray:
    """Phase field of a CSG tree: q(d/eps) on non-xor nodes, xor combined
    from the factors' phase fields (u_a + u_b - 2 u_a u_b)."""
    if isinstance(shape, Xor):
        ua = phase_field(shape.a, x, eps)
        ub = phase_field(shape.b, x, eps)
        return ua + ub - 2.0 * ua * ub
    return profile_q(shape.sdf(x) / eps)


@dataclass(frozen=True)
class InitPair:
    """Initial (u, mu) pair; mu in the W'(u)/eps^2 - Delta u scaling."""

    u0: np.ndarray
    mu0: np.ndarray
    eps: float


def init_fields(shape: Shape, grid: PeriodicGrid, eps: float) -> InitPair:
    """Build u0 = q(d/eps) and the constitutive mu0 on `grid`.

    mu0 = W'(u0)/eps^2 - Lap u0 is defined for any CSG shape (the closed
    form -(1/eps) Delta d q'(d/eps) needs a pointwise Delta d) and agrees
    with the closed form to O(eps) near the interface; see
    closed_form_mu0 for the oracle.  The committed steps of the flow
    enforce the same relation exactly, so the chemical potential is a
    dependent field and this choice does not alter trajectories.

    Requires eps >= 2 dx so the transition layer is resolvable; warns if the
    shape gets within 4 eps of the box boundary (periodic images interact).
    """
    if eps < 2.0 * grid.spacing:
        raise ValueError(
            f"eps={eps:g} is below 2*dx={2.0 * grid.spacing:g}: interface unresolvable"
        )
    center = np.full(grid.dims, 0.5)
    reach = shape.bounds_radius(center)
    if reach is not None and reach > 0.5 - 4.0 * eps:
        warnings.warn(
            f"shape extends to {reach:.3f} from the box center; margin to the "
            f"periodic boundary is below 4*eps={4.0 * eps:.3f}",
            stacklevel=2,
        )
    x = grid.coords()
    u0 = phase_field(shape, x, eps)
    mu0 = well(u0, 1) / eps**2 - laplacian(grid, u0)
    return InitPair(u0=u0, mu0=mu0, eps=eps)


def closed_form_mu0(shape: Shape, grid: PeriodicGrid, eps: float) -> np.ndarray | None:
    """The closed-form initial chemical potential -(1/eps) Delta d q'(d/eps).

    Available when the shape provides a pointwise Delta d; |Delta d| is
    capped at the resolvable curvature 1/eps (medial-axis singularities
    would otherwise outrun the profile decay).  Serves as the independent
    oracle for the constitutive mu0 near the interface.
    """
    x = grid.coords()
    lap_d = None if isinstance(shape, Xor) else shape.sdf_laplacian(x)
    if lap_d is None:
        return None
    d = shape.sdf(x)
    lap_d = np.clip(lap_d, -1.0 / eps, 1.0 / eps)
    return -(1.0 / eps) * lap_d * profile_q(d / eps, 1)


# ---------------------------------------------------------------------------
# scene catalog
# ---------------------------------------------------------------------------

SCENE_NAMES = (
    "circle",
    "two_circles",
    "two_tangent_circles",
    "circle_cut_by_line",
    "torus",
    "two_spheres",
    "two_cylinders",
    "cube_cut_by_plane",
    "cross",
)


def builtin_scene(name: str, **params) -> Shape:
    """Named initial sets for the desk experiments.

    2D scenes: circle, two_circles (gap > 0), two_tangent_circles,
    circle_cut_by_line, cross.  3D scenes: torus, two_spheres,
    two_cylinders, cube_cut_by_plane.

    Circle/sphere scenes accept `radius` (default 0.15); pair scenes accept
    `gap`, the free distance between the two boundaries.
    """
    r = float(params.pop("radius", 0.15))

    def pair_centers(gap: float, dims: int):
        off = r + 0.5 * gap
        ca = (0.5 - off,) + (0.5,) * (dims - 1)
        cb = (0.5 + off,) + (0.5,) * (dims - 1)
        return ca, cb

    if name == "circle":
        shape = Ball(center=(0.5, 0.5), radius=r)
    elif name == "two_circles":
        gap = float(params.pop("gap"))
        if gap <= 0:
            raise ValueError("two_circles needs gap > 0; use two_tangent_circles for gap 0")
        ca, cb = pair_centers(gap, 2)
        shape = Union((Ball(ca, r), Ball(cb, r)))
    elif name == "two_tangent_circles":
        ca, cb = pair_centers(0.0, 2)
        shape = Union((Ball(ca, r), Ball(cb, r)))
    elif name == "circle_cut_by_line":
        offset = float(params.pop("offset", 0.0))
        shape = Xor(
            Ball(center=(0.5, 0.5), radius=r),
            Halfspace(point=(0.5, 0.5 + offset), normal=(0.0, 1.0)),
        )
    elif name == "cross":
        # periodic checkerboard with u ~ 1 in quadrants I and III: xor of
        # the stripes {1/2 < x < 1} and {0 < y < 1/2}; the nodal lines
        # x, y in {0, 1/2} form the saddle lattice
        shape = Xor(
            Slab(axis=0, center=0.75, half_width=0.25),
            Slab(axis=1, center=0.25, half_width=0.25),
        )
    elif name == "torus":
        major = float(params.pop("major_radius", 0.26))
        minor = float(params.pop("minor_radius", 0.13))
        shape = Torus(center=(0.5, 0.5, 0.5), axis=2, major_radius=major, minor_radius=minor)
    elif name == "two_spheres":
        gap = float(params.pop("gap"))
        ca, cb = pair_centers(gap, 3)
        shape = Union((Ball(ca, r), Ball(cb, r)))
    elif name == "two_cylinders":
        gap = float(params.pop("gap"))
        off = r + 0.5 * gap
        shape = Union(
            (
                Cylinder(point=(0.5 - off, 0.5, 0.5), direction=(0.0, 0.0, 1.0), radius=r),
                Cylinder(point=(0.5 + off, 0.5, 0.5), direction=(0.0, 0.0, 1.0), radius=r),
            )
        )
    elif name == "cube_cut_by_plane":
        half = float(params.pop("half_extent", 0.2))
        shape = Xor(
            Box(center=(0.5, 0.5, 0.5), half_extents=(half,) * 3),
            Halfspace(point=(0.5, 0.5, 0.5), normal=(0.0, 0.0, 1.0)),
        )
    else:
        raise ValueError(f"unknown scene {name!r}; known scenes: {', '.join(SCENE_NAMES)}")

    if params:
        raise ValueError(f"unused scene parameters for {name!r}: {sorted(params)}")
    return shape
