"""On-disk formats: binary snapshots, series CSV, contour CSV.

Snapshot layout (little-endian):

    magic   4 bytes  "PFWF"
    version u32      1
    dims    u8
    points  u32      sample points per axis (uniform grids)
    eps     f64
    alpha   f64
    time    f64
    flow    u8       0 = classical, 1 = mugnai, 2 = allen_cahn
    u       f64 x points^dims, row-major
    mu      f64 x points^dims, row-major

Round trips are bit-exact. Series rows are written with 17 significant
digits so the CSV parses back losslessly. All writers are whole-file
atomic (temp file + rename).
"""

from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .analysis import Contour, SeriesPoint
from .energies import EnergyReport

__all__ = [
    "Snapshot",
    "SnapshotError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedSnapshotError",
    "write_snapshot",
    "read_snapshot",
    "SERIES_HEADER",
    "write_series",
    "read_series",
    "write_contour_csv",
    "read_contour_csv",
]

MAGIC = b"PFWF"
VERSION = 1
FLOW_CODES = {"classical": 0, "mugnai": 1, "allen_cahn": 2}
FLOW_NAMES = {v: k for k, v in FLOW_CODES.items()}

_HEADER = struct.Struct("<4sIBIdddB")


class SnapshotError(ValueError):
    """Base class for snapshot format problems."""


class BadMagicError(SnapshotError):
    pass


class UnsupportedVersionError(SnapshotError):
    pass


class TruncatedSnapshotError(SnapshotError):
    pass


@dataclass(frozen=True)
class Snapshot:
    """One saved (u, mu) state plus the header metadata."""

    dims: int
    points: int
    eps: float
    alpha: float
    time: float
    flow: str
    u: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        shape = (self.points,) * self.dims
        if self.u.shape != shape or self.mu.shape != shape:
            raise SnapshotError(
                f"payload shapes {self.u.shape}/{self.mu.shape} do not match header {shape}"
            )
        if self.flow not in FLOW_CODES:
            raise SnapshotError(f"unknown flow kind {self.flow!r}")


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_snapshot(path: str, snap: Snapshot) -> None:
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        snap.dims,
        snap.points,
        snap.eps,
        snap.alpha,
        snap.time,
        FLOW_CODES[snap.flow],
    )
    u = np.ascontiguousarray(snap.u, dtype="<f8")
    mu = np.ascontiguousarray(snap.mu, dtype="<f8")
    _atomic_write(path, header + u.tobytes() + mu.tobytes())


def read_snapshot(path: str) -> Snapshot:
    with open(path, "rb") as handle:
        blob = handle.read()
    if len(blob) < _HEADER.size:
        if blob[:4] != MAGIC:
            raise BadMagicError(f"{path}: not a PFWF snapshot")
        raise TruncatedSnapshotError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, dims, points, eps, alpha, time_, flow_code = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported version {version}")
    if flow_code not in FLOW_NAMES:
        raise SnapshotError(f"{path}: unknown flow code {flow_code}")
    count = points**dims
    expected = _HEADER.size + 2 * 8 * count
    if len(blob) != expected:
        raise TruncatedSnapshotError(
            f"{path}: expected {expected} bytes for a {points}^{dims} snapshot, got {len(blob)}"
        )
    payload = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    shape = (points,) * dims
    u = payload[:count].reshape(shape).copy()
    mu = payload[count:].reshape(shape).copy()
    return Snapshot(
        dims=dims,
        points=points,
        eps=eps,
        alpha=alpha,
        time=time_,
        flow=FLOW_NAMES[flow_code],
        u=u,
        mu=mu,
    )


# ---------------------------------------------------------------------------
# series CSV
# ---------------------------------------------------------------------------

SERIES_HEADER = "t,R_est,E_perimeter,E_classical,E_mugnai,components,min_pair_distance,fp_iters"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_series(path: str, series: list[SeriesPoint]) -> None:
    lines = [SERIES_HEADER]
    for point in series:
        lines.append(
            ",".join(
                (
                    _fmt(point.t),
                    _fmt(point.R_est),
                    _fmt(point.energies.perimeter_Peps),
                    _fmt(point.energies.classical_Weps),
                    _fmt(point.energies.mugnai_Weps),
                    _fmt(point.component_count),
                    _fmt(point.min_pair_distance),
                    _fmt(point.fp_iters),
                )
            )
        )
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_series(path: str) -> list[SeriesPoint]:
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines or lines[0] != SERIES_HEADER:
        raise ValueError(f"{path}: missing or unexpected series header")
    out: list[SeriesPoint] = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 8:
            raise ValueError(f"{path}: malformed series row {line!r}")

        def opt_float(cell: str) -> float | None:
            return None if cell == "" else float(cell)

        def opt_int(cell: str) -> int | None:
            return None if cell == "" else int(cell)

        out.append(
            SeriesPoint(
                t=float(cells[0]),
                R_est=opt_float(cells[1]),
                energies=EnergyReport(
                    perimeter_Peps=opt_float(cells[2]),
                    classical_Weps=opt_float(cells[3]),
                    mugnai_Weps=opt_float(cells[4]),
                ),
                component_count=opt_int(cells[5]),
                min_pair_distance=opt_float(cells[6]),
                fp_iters=opt_int(cells[7]),
            )
        )
    return out


# ---------------------------------------------------------------------------
# contour CSV
# ---------------------------------------------------------------------------

CONTOUR_HEADER = "polyline_id,x,y"


def write_contour_csv(path: str, contour: Contour) -> None:
    lines = [CONTOUR_HEADER]
    for pid, pts in enumerate(contour.polylines):
        for x, y in pts:
            lines.append(f"{pid},{format(x, '.17g')},{format(y, '.17g')}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_contour_csv(path: str) -> list[np.ndarray]:
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines or lines[0] != CONTOUR_HEADER:
        raise ValueError(f"{path}: missing or unexpected contour header")
    groups: dict[int, list[tuple[float, float]]] = {}
    for line in lines[1:]:
        pid, x, y = line.split(",")
        groups.setdefault(int(pid), []).append((float(x), float(y)))
    return [np.array(groups[pid]) for pid in sorted(groups)]
