"""Battlefield maps, ground-truth routes through landmark clusters, and safe corridors.

A scenario file is JSON with this layout (``version`` must match
:data:`SCHEMA_VERSION`)::

    {
      "version": "secnav.scenario/1",
      "map": {"width": 200.0, "height": 200.0},
      "landmarks": [{"id": 0, "x": 21.3, "y": 30.1, "cluster": 0}, ...],
      "obstacles": [[[x, y], [x, y], ...], ...],
      "paths": [{"id": "PC1-1", "class": "PC1", "cluster_sequence": [4, 5, 6],
                 "margin": 5.0, "segment_len": 20.0}, ...],
      "noise": {"process": {...}, "measurement": {...}}      # optional
    }

Floats are written with ``repr`` precision, so a save/load round trip is exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyCluster, ParseError, ScenarioError, VersionMismatch
from .geometry import ConvexHullPolygon, PathSegment, Point2, graham_scan, point_in_convex_hull, polygon_centroid
from .localization import Landmark, MeasurementNoise
from .motion import ProcessNoise

SCHEMA_VERSION = "secnav.scenario/1"

DEFAULT_MARGIN = 5.0
DEFAULT_SEGMENT_LEN = 20.0
DEFAULT_SAMPLE_SPACING = 1.0


@dataclass(frozen=True)
class BattlefieldMap:
    width: float = 200.0
    height: float = 200.0
    landmarks: tuple[Landmark, ...] = ()
    obstacles: tuple[tuple[Point2, ...], ...] = ()

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("map width and height must be > 0")
        ids = [lm.id for lm in self.landmarks]
        if len(set(ids)) != len(ids):
            raise ValueError("landmark ids must be unique")
        for lm in self.landmarks:
            x, y = lm.position
            if not (0 <= x <= self.width and 0 <= y <= self.height):
                raise ValueError(f"landmark {lm.id} at ({x}, {y}) lies outside the map")
        clusters = sorted({lm.cluster_id for lm in self.landmarks})
        if clusters != list(range(len(clusters))):
            raise ValueError("cluster ids must be contiguous from 0")

    def cluster(self, cid: int) -> list[Landmark]:
        return [lm for lm in self.landmarks if lm.cluster_id == cid]

    def cluster_centroid(self, cid: int) -> Point2:
        members = self.cluster(cid)
        if not members:
            raise EmptyCluster(f"cluster {cid} has no landmarks")
        xs = math.fsum(lm.position[0] for lm in members) / len(members)
        ys = math.fsum(lm.position[1] for lm in members) / len(members)
        return Point2(xs, ys)

    @property
    def n_clusters(self) -> int:
        return len({lm.cluster_id for lm in self.landmarks})


@dataclass(frozen=True)
class GroundTruthTrajectory:
    waypoints: tuple[Point2, ...]
    polyline: np.ndarray
    length: float

    def arc_positions(self) -> np.ndarray:
        """Cumulative arc length at each polyline sample."""
        seg = np.diff(self.polyline, axis=0)
        return np.concatenate([[0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))])

    def timestamps(self, speed: float) -> np.ndarray:
        """Sample times when the polyline is traversed at constant ``speed``."""
        if not speed > 0:
            raise ValueError("speed must be > 0")
        return self.arc_positions() / speed


def generate_ground_truth(
    bmap: BattlefieldMap,
    cluster_sequence: Sequence[int],
    sample_spacing: float = DEFAULT_SAMPLE_SPACING,
) -> GroundTruthTrajectory:
    """Piecewise-linear route through the centroids of the listed clusters.

    Each leg is sampled every ``sample_spacing`` metres; both endpoints of every
    leg are kept so the polyline passes exactly through every waypoint.
    """
    if len(cluster_sequence) < 2:
        raise ValueError("a route needs at least two clusters")
    if not sample_spacing > 0:
        raise ValueError("sample_spacing must be > 0")
    for cid in cluster_sequence:
        if len(bmap.cluster(cid)) < 3:
            raise EmptyCluster(f"cluster {cid} has fewer than three landmarks")
    wps = tuple(bmap.cluster_centroid(c) for c in cluster_sequence)
    pts = [np.array([wps[0]])]
    for a, b in zip(wps[:-1], wps[1:]):
        leg = math.hypot(b[0] - a[0], b[1] - a[1])
        n = max(1, math.ceil(leg / sample_spacing - 1e-9))
        s = np.minimum(np.arange(1, n + 1) * sample_spacing, leg) / leg if leg > 0 else np.ones(1)
        s[-1] = 1.0
        pts.append(np.column_stack([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]))
    poly = np.vstack(pts)
    seg = np.diff(poly, axis=0)
    length = math.fsum(np.hypot(seg[:, 0], seg[:, 1]).tolist())
    return GroundTruthTrajectory(wps, poly, length)


@dataclass(frozen=True)
class SafeCorridor:
    """Ordered hull-bounded segments plus the start and goal of the route."""

    segments: tuple[PathSegment, ...]
    hulls: tuple[ConvexHullPolygon, ...]
    centroids: tuple[Point2, ...]
    start: Point2
    goal: Point2

    def __post_init__(self):
        if not len(self.segments) == len(self.hulls) == len(self.centroids):
            raise ValueError("segments, hulls and centroids must align")
        if not self.segments:
            raise ValueError("corridor has no segments")

    def __len__(self):
        return len(self.hulls)

    def contains(self, p, hint: int = 0) -> bool:
        """True when ``p`` lies in any hull; hulls from ``hint`` on are tried first."""
        order = self.hulls[hint:] + self.hulls[:hint]
        return any(point_in_convex_hull(p, h) for h in order)

    def waypoints(self) -> tuple[Point2, ...]:
        """Steering sequence: every segment centroid in order, then the goal."""
        return (*self.centroids, self.goal)

    def centroid_polyline_length(self) -> float:
        """Length of start -> centroids -> goal, the path a noiseless run follows."""
        pts = (self.start, *self.waypoints())
        return math.fsum(math.dist(a, b) for a, b in zip(pts[:-1], pts[1:]))


def _unit(dx, dy):
    n = math.hypot(dx, dy)
    return (dx / n, dy / n) if n > 0 else None


def build_safe_corridor(
    truth: GroundTruthTrajectory,
    margin: float = DEFAULT_MARGIN,
    segment_len: float = DEFAULT_SEGMENT_LEN,
) -> SafeCorridor:
    """Split the route into ~``segment_len`` stretches and hull each one widened by ``margin``.

    Every polyline sample contributes itself plus its perpendicular offsets at
    +/- ``margin``; samples where the route turns are offset along both legs,
    and the first and last samples are also capped ``margin`` beyond the ends.
    Neighbouring segments share their boundary sample, so the hulls connect.
    """
    if not margin > 0:
        raise ValueError("margin must be > 0")
    if not segment_len > 0:
        raise ValueError("segment_len must be > 0")
    poly = truth.polyline
    n = len(poly)
    s = truth.arc_positions()
    total = s[-1]

    dirs_in = [None] + [_unit(*(poly[i] - poly[i - 1])) for i in range(1, n)]
    dirs_out = [_unit(*(poly[i + 1] - poly[i])) for i in range(n - 1)] + [None]

    def widened(i):
        x, y = float(poly[i, 0]), float(poly[i, 1])
        out = [Point2(x, y)]
        for d in {dirs_in[i], dirs_out[i]} - {None}:
            nx, ny = -d[1], d[0]
            out.append(Point2(x + margin * nx, y + margin * ny))
            out.append(Point2(x - margin * nx, y - margin * ny))
        # the two ends get a cap one margin deep, so start and goal are interior
        cap = dirs_out[i] if i == 0 else dirs_in[i] if i == n - 1 else None
        if cap is not None:
            sgn = -1.0 if i == 0 else 1.0
            cx, cy = x + sgn * margin * cap[0], y + sgn * margin * cap[1]
            out.append(Point2(cx - margin * cap[1], cy + margin * cap[0]))
            out.append(Point2(cx + margin * cap[1], cy - margin * cap[0]))
        return out

    n_seg = max(1, int(round(total / segment_len)))
    bounds = [total * k / n_seg for k in range(n_seg + 1)]
    segments, hulls, centroids = [], [], []
    for k in range(n_seg):
        i0 = int(np.searchsorted(s, bounds[k] + 1e-9, side="right")) - 1
        i1 = int(np.searchsorted(s, bounds[k + 1] - 1e-9, side="left"))
        i0, i1 = max(i0, 0), min(max(i1, i0 + 1), n - 1)
        pts = tuple(p for i in range(i0, i1 + 1) for p in widened(i))
        seg = PathSegment(pts, k)
        hull = graham_scan(pts)
        segments.append(seg)
        hulls.append(hull)
        centroids.append(polygon_centroid(hull))
        if k > 0:
            shared = poly[i0]
            if not (point_in_convex_hull(shared, hulls[k - 1]) and point_in_convex_hull(shared, hull)):
                raise ScenarioError(f"segments {k - 1} and {k} do not connect")
    start = Point2(float(poly[0, 0]), float(poly[0, 1]))
    goal = Point2(float(poly[-1, 0]), float(poly[-1, 1]))
    return SafeCorridor(tuple(segments), tuple(hulls), tuple(centroids), start, goal)


@dataclass(frozen=True)
class PathSpec:
    id: str
    path_class: str
    cluster_sequence: tuple[int, ...]
    margin: float = DEFAULT_MARGIN
    segment_len: float = DEFAULT_SEGMENT_LEN


@dataclass(frozen=True)
class NoiseConfig:
    process: ProcessNoise = field(default_factory=ProcessNoise)
    measurement: MeasurementNoise = field(default_factory=MeasurementNoise)


@dataclass(frozen=True)
class Scenario:
    map: BattlefieldMap
    paths: tuple[PathSpec, ...] = ()
    noise: NoiseConfig | None = None
    sample_spacing: float = DEFAULT_SAMPLE_SPACING

    def path(self, path_id: str) -> PathSpec:
        for p in self.paths:
            if p.id == path_id:
                return p
        raise KeyError(path_id)

    def ground_truth(self, path: PathSpec) -> GroundTruthTrajectory:
        return generate_ground_truth(self.map, path.cluster_sequence, self.sample_spacing)

    def corridor(self, path: PathSpec) -> SafeCorridor:
        return build_safe_corridor(self.ground_truth(path), path.margin, path.segment_len)

    def path_classes(self) -> dict[str, list[PathSpec]]:
        out: dict[str, list[PathSpec]] = {}
        for p in self.paths:
            out.setdefault(p.path_class, []).append(p)
        return out


# -- serialisation ---------------------------------------------------------------


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {
        "version": SCHEMA_VERSION,
        "map": {"width": sc.map.width, "height": sc.map.height},
        "sample_spacing": sc.sample_spacing,
        "landmarks": [
            {"id": lm.id, "x": lm.position[0], "y": lm.position[1], "cluster": lm.cluster_id}
            for lm in sc.map.landmarks
        ],
        "obstacles": [[[p[0], p[1]] for p in poly] for poly in sc.map.obstacles],
        "paths": [
            {
                "id": p.id,
                "class": p.path_class,
                "cluster_sequence": list(p.cluster_sequence),
                "margin": p.margin,
                "segment_len": p.segment_len,
            }
            for p in sc.paths
        ],
    }
    if sc.noise is not None:
        doc["noise"] = {"process": asdict(sc.noise.process), "measurement": asdict(sc.noise.measurement)}
    return doc


def dumps(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=1) + "\n"


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(dumps(sc), encoding="utf-8")


def _get(d, key, kind, where):
    if not isinstance(d, dict) or key not in d:
        raise ParseError("missing field", field=f"{where}{key}")
    val = d[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError(f"expected a number, got {type(val).__name__}", field=f"{where}{key}")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ParseError(f"expected an integer, got {type(val).__name__}", field=f"{where}{key}")
        return val
    if not isinstance(val, kind):
        raise ParseError(f"expected {kind.__name__}, got {type(val).__name__}", field=f"{where}{key}")
    return val


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    version = doc.get("version")
    if version is None:
        raise ParseError("missing field", field="version")
    if version != SCHEMA_VERSION:
        raise VersionMismatch(f"scenario version {version!r}, expected {SCHEMA_VERSION!r}")
    m = _get(doc, "map", dict, "")
    landmarks = []
    for i, item in enumerate(_get(doc, "landmarks", list, "")):
        w = f"landmarks[{i}]."
        pos = Point2(_get(item, "x", float, w), _get(item, "y", float, w))
        landmarks.append(Landmark(_get(item, "id", int, w), pos, _get(item, "cluster", int, w)))
    obstacles = []
    for i, poly in enumerate(doc.get("obstacles", [])):
        try:
            obstacles.append(tuple(Point2(float(x), float(y)) for x, y in poly))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad polygon: {exc}", field=f"obstacles[{i}]") from None
    paths = []
    for i, item in enumerate(_get(doc, "paths", list, "")):
        w = f"paths[{i}]."
        seq = _get(item, "cluster_sequence", list, w)
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in seq):
            raise ParseError("cluster ids must be integers", field=f"{w}cluster_sequence")
        paths.append(
            PathSpec(
                id=str(item.get("id", f"path-{i}")),
                path_class=str(_get(item, "class", str, w)),
                cluster_sequence=tuple(seq),
                margin=float(item.get("margin", DEFAULT_MARGIN)),
                segment_len=float(item.get("segment_len", DEFAULT_SEGMENT_LEN)),
            )
        )
    noise = None
    if "noise" in doc:
        nd = _get(doc, "noise", dict, "")
        try:
            noise = NoiseConfig(
                ProcessNoise(**nd.get("process", {})),
                MeasurementNoise(**nd.get("measurement", {})),
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad noise block: {exc}", field="noise") from None
    try:
        bmap = BattlefieldMap(
            _get(m, "width", float, "map."),
            _get(m, "height", float, "map."),
            tuple(landmarks),
            tuple(obstacles),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), field="map") from None
    spacing = float(doc.get("sample_spacing", DEFAULT_SAMPLE_SPACING))
    return Scenario(bmap, tuple(paths), noise, spacing)


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    return loads(Path(path).read_text(encoding="utf-8"))


# -- built-in battlefield -----------------------------------------------------------

GRID = 4
#: cluster-grid routes (column, row) for the three built-in path classes
BUILTIN_ROUTES = {
    "PC1": [
        [(0, 1), (1, 1), (2, 1), (3, 1)],
        [(0, 2), (1, 2), (2, 2), (3, 2)],
        [(0, 1), (1, 1), (2, 2), (3, 2)],
        [(0, 2), (1, 2), (2, 1), (3, 1)],
        [(0, 0), (1, 1), (2, 1), (3, 1)],
        [(0, 3), (1, 2), (2, 2), (3, 2)],
    ],
    "PC2": [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(2, 0), (2, 1), (2, 2), (2, 3)],
        [(1, 0), (1, 1), (2, 2), (2, 3)],
        [(2, 0), (2, 1), (1, 2), (1, 3)],
        [(0, 0), (1, 1), (1, 2), (1, 3)],
    ],
    "PC3": [
        [(0, 0), (1, 1), (2, 2), (3, 3)],
        [(3, 0), (2, 1), (1, 2), (0, 3)],
        [(0, 0), (1, 0), (2, 1), (3, 2), (3, 3)],
        [(0, 3), (0, 2), (1, 1), (2, 0), (3, 0)],
        [(0, 1), (1, 2), (2, 2), (3, 3)],
        [(0, 0), (1, 0), (2, 1), (2, 2), (3, 3)],
    ],
}


def _cluster_id(col: int, row: int) -> int:
    return row * GRID + col


def generate_battlefield(
    seed: int = 0,
    width: float = 200.0,
    height: float = 200.0,
    landmarks_per_cluster: tuple[int, int] = (4, 6),
    cluster_radius: tuple[float, float] = (3.0, 9.0),
    jitter: float = 6.0,
) -> BattlefieldMap:
    """Landmark clusters on a jittered 4x4 grid covering the map."""
    if not (width > 0 and height > 0):
        raise ValueError("map width and height must be > 0")
    rng = np.random.default_rng(seed)
    cw, ch = width / GRID, height / GRID
    landmarks = []
    for row in range(GRID):
        for col in range(GRID):
            cx = (col + 0.5) * cw + rng.uniform(-jitter, jitter) * cw / 50.0
            cy = (row + 0.5) * ch + rng.uniform(-jitter, jitter) * ch / 50.0
            k = int(rng.integers(landmarks_per_cluster[0], landmarks_per_cluster[1] + 1))
            # evenly spread bearings with jitter keep every triple well away from collinear
            base = rng.uniform(0, 2 * math.pi)
            for j in range(k):
                ang = base + 2 * math.pi * j / k + rng.uniform(-0.3, 0.3)
                r = rng.uniform(*cluster_radius) * min(cw, ch) / 50.0
                x = min(max(cx + r * math.cos(ang), 0.0), width)
                y = min(max(cy + r * math.sin(ang), 0.0), height)
                landmarks.append(Landmark(len(landmarks), Point2(round(x, 3), round(y, 3)), _cluster_id(col, row)))
    return BattlefieldMap(width, height, tuple(landmarks))


#: noise used by the built-in experiment; ranging in motion is far worse than static fixes
FIELD_NOISE = NoiseConfig(
    process=ProcessNoise(sigma_x=0.05, sigma_y=0.05, sigma_theta=0.01, sigma_v=0.05),
    measurement=MeasurementNoise(sigma_range=0.4, sigma_speed=0.2),
)


def builtin_scenario(
    seed: int = 0,
    width: float = 200.0,
    height: float = 200.0,
    margin: float = DEFAULT_MARGIN,
    segment_len: float = DEFAULT_SEGMENT_LEN,
    noise: NoiseConfig | None = FIELD_NOISE,
) -> Scenario:
    """Random landmark layout plus the three built-in path classes (6, 5 and 6 routes)."""
    bmap = generate_battlefield(seed, width, height)
    paths = []
    for cls, routes in BUILTIN_ROUTES.items():
        for k, route in enumerate(routes, start=1):
            seq = tuple(_cluster_id(c, r) for c, r in route)
            paths.append(PathSpec(f"{cls}-{k}", cls, seq, margin, segment_len))
    return Scenario(bmap, tuple(paths), noise)
