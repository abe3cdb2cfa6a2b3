"""Level-set post-processing: isocontours, radius estimates, components, distances.

The 1/2-level sets of the phase field are the observable interfaces.  A
marching-squares pass (with linear interpolation along cell edges and
periodic wraparound) extracts 2D contours; radii are measured from the
volume integral of u, which is second-order accurate for profile data
because q - 1/2 is odd across the interface; connected components use face
adjacency with periodic wrap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .energies import EnergyReport

__all__ = [
    "Contour",
    "extract_contour",
    "contour_length",
    "estimate_radius",
    "count_components",
    "min_pair_distance",
    "SeriesPoint",
    "assemble_series",
    "torus_slice_ratio",
]


@dataclass
class Contour:
    """Polylines of one isolevel; points in [0,1]^2, row (x, y)."""

    polylines: list[np.ndarray]
    closed: list[bool]
    level: float
    time: float = 0.0


def _edge_crossing(side: int, ix: int, iy: int, ua: float, ub: float, level: float, dx: float):
    """Crossing point on an oriented cell edge; side 0 = along x, 1 = along y."""
    frac = (level - ua) / (ub - ua)
    if side == 0:
        return ((ix + frac) * dx, iy * dx)
    return (ix * dx, (iy + frac) * dx)


# Per marching-squares case: list of segments, each a pair of local edge ids
# 0: bottom (y=0, along x), 1: right (x=1, along y), 2: top (y=1, along x),
# 3: left (x=0, along y).
_CASES = {
    0: [],
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    5: None,  # saddle
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(2, 0)],
    10: None,  # saddle
    11: [(2, 1)],
    12: [(1, 3)],
    13: [(1, 0)],
    14: [(0, 3)],
    15: [],
}


def extract_contour(u: np.ndarray, level: float = 0.5, time: float = 0.0) -> Contour:
    """Marching squares on a 2D periodic field.

    Ambiguous saddle cells are split according to the cell-center average;
    contours that wrap the periodic box are cut at the boundary into open
    polylines (a caller comparing two interfaces should make sure each one
    is interior to the box).
    """
    if u.ndim != 2:
        raise ValueError("extract_contour expects a 2D field")
    M = u.shape[0]
    dx = 1.0 / M

    # node values at the 4 corners of every cell (ix, iy) with wrap
    c00 = u
    c10 = np.roll(u, -1, axis=0)
    c01 = np.roll(u, -1, axis=1)
    c11 = np.roll(np.roll(u, -1, axis=0), -1, axis=1)

    case = (
        (c00 > level).astype(int)
        + 2 * (c10 > level).astype(int)
        + 4 * (c11 > level).astype(int)
        + 8 * (c01 > level).astype(int)
    )

    # edge key -> crossing point; segments as (edge_key_a, edge_key_b)
    # Edge keys: ("h", ix, iy) = edge from node (ix,iy) to (ix+1,iy),
    #            ("v", ix, iy) = edge from node (ix,iy) to (ix,iy+1), indices mod M.
    def edge_key(local: int, ix: int, iy: int):
        if local == 0:
            return ("h", ix % M, iy % M)
        if local == 2:
            return ("h", ix % M, (iy + 1) % M)
        if local == 3:
            return ("v", ix % M, iy % M)
        return ("v", (ix + 1) % M, iy % M)

    points: dict[tuple, tuple[float, float]] = {}
    segments: list[tuple[tuple, tuple]] = []

    cells = np.argwhere((case > 0) & (case < 15))
    for ix, iy in cells:
        cs = case[ix, iy]
        corner = {
            0: c00[ix, iy],
            1: c10[ix, iy],
            2: c11[ix, iy],
            3: c01[ix, iy],
        }
        segs = _CASES[cs]
        if segs is None:
            center = 0.25 * (corner[0] + corner[1] + corner[2] + corner[3])
            if cs == 5:  # corners 0 and 2 above
                segs = [(3, 2), (1, 0)] if center > level else [(3, 0), (1, 2)]
            else:  # cs == 10, corners 1 and 3 above
                segs = [(0, 3), (2, 1)] if center > level else [(0, 1), (2, 3)]
        for a, b in segs:
            ka, kb = edge_key(a, ix, iy), edge_key(b, ix, iy)
            for local, key in ((a, ka), (b, kb)):
                if key in points:
                    continue
                if local == 0:
                    points[key] = _edge_crossing(0, ix, iy, corner[0], corner[1], level, dx)
                elif local == 2:
                    points[key] = _edge_crossing(0, ix, iy + 1, corner[3], corner[2], level, dx)
                elif local == 3:
                    points[key] = _edge_crossing(1, ix, iy, corner[0], corner[3], level, dx)
                else:
                    points[key] = _edge_crossing(1, ix + 1, iy, corner[1], corner[2], level, dx)
            segments.append((ka, kb))

    # stitch segments into polylines over the edge graph
    adjacency: dict[tuple, list[tuple]] = {}
    for ka, kb in segments:
        adjacency.setdefault(ka, []).append(kb)
        adjacency.setdefault(kb, []).append(ka)

    unused = {key: list(nbrs) for key, nbrs in adjacency.items()}
    visited_edges: set[frozenset] = set()
    polylines: list[np.ndarray] = []
    closed_flags: list[bool] = []

    def walk(start: tuple) -> list[tuple]:
        path = [start]
        current = start
        while True:
            nxt = None
            for cand in unused.get(current, ()):
                ek = frozenset((current, cand))
                if ek not in visited_edges:
                    nxt = cand
                    visited_edges.add(ek)
                    break
            if nxt is None:
                return path
            path.append(nxt)
            current = nxt
            if current == start:
                return path

    # open chains first (degree-1 endpoints), then remaining loops
    keys = sorted(adjacency.keys())
    for key in keys:
        if len(adjacency[key]) == 1:
            path = walk(key)
            if len(path) > 1:
                polylines.append(np.array([points[k] for k in path]))
                closed_flags.append(False)
    for key in keys:
        remaining = [k for k in unused.get(key, ()) if frozenset((key, k)) not in visited_edges]
        if remaining:
            path = walk(key)
            if len(path) > 1:
                is_closed = path[0] == path[-1]
                pts = np.array([points[k] for k in (path[:-1] if is_closed else path)])
                polylines.append(pts)
                closed_flags.append(is_closed)

    # cut polylines at periodic wrap jumps so coordinates stay in [0,1]
    cut_polys: list[np.ndarray] = []
    cut_closed: list[bool] = []
    for pts, closed in zip(polylines, closed_flags):
        seq = np.vstack([pts, pts[:1]]) if closed else pts
        jumps = np.where(np.max(np.abs(np.diff(seq, axis=0)), axis=1) > 0.5)[0]
        if jumps.size == 0:
            cut_polys.append(pts)
            cut_closed.append(closed)
            continue
        pieces = np.split(seq, jumps + 1)
        if closed and len(pieces) > 1:
            pieces = [np.vstack([pieces[-1], pieces[0]])] + pieces[1:-1]
        for piece in pieces:
            if piece.shape[0] > 1:
                cut_polys.append(piece)
                cut_closed.append(False)

    return Contour(polylines=cut_polys, closed=cut_closed, level=level, time=time)


def _per_segment_lengths(pts: np.ndarray, closed: bool) -> np.ndarray:
    seq = np.vstack([pts, pts[:1]]) if closed else pts
    d = np.diff(seq, axis=0)
    d = np.where(d > 0.5, d - 1.0, np.where(d < -0.5, d + 1.0, d))  # periodic metric
    return np.sqrt(np.sum(d * d, axis=1))


def contour_length(contour: Contour) -> float:
    """Total polyline length under the periodic metric."""
    return float(
        sum(_per_segment_lengths(p, c).sum() for p, c in zip(contour.polylines, contour.closed))
    )


def estimate_radius(u: np.ndarray) -> float:
    """Radius of the equivalent disk/ball from the volume integral of u.

    2D: R = sqrt(mean(u)/pi); 3D: R = (3 mean(u) / 4 pi)^(1/3); u is read as
    a smoothed indicator on the unit box.
    """
    m = float(np.mean(u))
    if m <= 0.0:
        raise ValueError(f"mean(u) = {m:g} <= 0: radius undefined")
    if u.ndim == 2:
        return float(np.sqrt(m / np.pi))
    if u.ndim == 3:
        return float((3.0 * m / (4.0 * np.pi)) ** (1.0 / 3.0))
    raise ValueError("estimate_radius expects a 2D or 3D field")


def count_components(u: np.ndarray, level: float = 0.5) -> int:
    """Connected components of {u > level}, face adjacency with periodic wrap."""
    mask = u > level
    labels, count = ndimage.label(mask)
    if count == 0:
        return 0
    # merge labels that touch across each periodic boundary
    parent = list(range(count + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for axis in range(u.ndim):
        lo = np.take(labels, 0, axis=axis).ravel()
        hi = np.take(labels, -1, axis=axis).ravel()
        for a, b in zip(lo, hi):
            if a > 0 and b > 0:
                union(int(a), int(b))

    return len({find(i) for i in range(1, count + 1)})


def _points_to_segments(pts: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> float:
    """Min distance from a point cloud (n,2) to a segment set (m,2)/(m,2)."""
    ab = seg_b - seg_a  # (m,2)
    denom = np.sum(ab * ab, axis=1)
    denom = np.where(denom == 0.0, 1.0, denom)
    rel = pts[:, None, :] - seg_a[None, :, :]  # (n,m,2)
    t = np.clip(np.einsum("nmd,md->nm", rel, ab) / denom[None, :], 0.0, 1.0)
    closest = rel - t[:, :, None] * ab[None, :, :]
    return float(np.sqrt(np.min(np.sum(closest * closest, axis=2))))


def min_pair_distance(contour: Contour) -> float:
    """Minimum distance between distinct polylines under the periodic metric.

    Point-to-segment distances, minimized over the 3^2 periodic images of
    one of the two polylines.
    """
    polys = contour.polylines
    if len(polys) < 2:
        raise ValueError("min_pair_distance needs at least two polylines")
    shifts = np.array(
        [[sx, sy] for sx in (-1.0, 0.0, 1.0) for sy in (-1.0, 0.0, 1.0)]
    )
    best = np.inf
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            b_pts = polys[j]
            seq = np.vstack([b_pts, b_pts[:1]]) if contour.closed[j] else b_pts
            seg_a, seg_b = seq[:-1], seq[1:]
            for shift in shifts:
                d = _points_to_segments(polys[i] + shift, seg_a, seg_b)
                if d < best:
                    best = d
    return float(best)


@dataclass(frozen=True)
class SeriesPoint:
    """One time sample of the run observables."""

    t: float
    R_est: float | None
    energies: EnergyReport
    component_count: int | None = None
    min_pair_distance: float | None = None
    fp_iters: int | None = None


def assemble_series(history: list[SeriesPoint]) -> list[SeriesPoint]:
    """Validate and sort a recorded history into a monotone time series."""
    out = sorted(history, key=lambda p: p.t)
    for a, b in zip(out, out[1:]):
        if b.t <= a.t:
            raise ValueError("series times must be strictly increasing")
    return out


def torus_slice_ratio(u: np.ndarray, level: float = 0.5, axis: int = 2) -> float:
    """major/minor radius ratio read off the equatorial slice of a 3D torus field.

    The slice through the torus center shows an annulus; the 1/2-contour
    radii r_in < r_out give R_major = (r_in + r_out)/2, r_minor =
    (r_out - r_in)/2.
    """
    if u.ndim != 3:
        raise ValueError("torus_slice_ratio expects a 3D field")
    M = u.shape[axis]
    sl = np.take(u, M // 2, axis=axis)
    contour = extract_contour(sl, level)
    if len(contour.polylines) < 2:
        raise ValueError("equatorial slice does not show two contours")
    center = np.array([0.5, 0.5])
    radii = sorted(
        float(np.mean(np.linalg.norm(p - center, axis=1))) for p in contour.polylines
    )
    r_in, r_out = radii[0], radii[-1]
    major = 0.5 * (r_in + r_out)
    minor = 0.5 * (r_out - r_in)
    if minor <= 0:
        raise ValueError("degenerate torus slice")
    return major / minor
