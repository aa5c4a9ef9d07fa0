"""
Convex hulls and the inclusion test behind every safety check.

Builds the same hull with Graham scan and Chan's algorithm, shows how
collinear boundary points are dropped, and probes the boundary band of
the half-plane inclusion test.
"""
import numpy as np

from secnav.geometry import BOUNDARY_EPS, chan_hull, graham_scan, point_in_convex_hull, polygon_area


def main():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(200, 2)) * [20.0, 8.0]
    g = graham_scan(pts)
    c = chan_hull(pts)
    print(f"200 random points -> {len(g)} hull vertices, area {polygon_area(g):.1f} m^2")
    print(f"Graham and Chan agree: {g.vertices == c.vertices}")

    # a square with its edge midpoints: only the corners survive
    square = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
    print("square with midpoints ->", [tuple(v) for v in graham_scan(square).vertices])

    h = graham_scan([(0, 0), (4, 0), (4, 4), (0, 4)])
    for label, p in [
        ("centre", (2.0, 2.0)),
        ("on an edge", (4.0, 1.0)),
        ("just outside, inside the band", (4.0 + 0.5 * BOUNDARY_EPS, 1.0)),
        ("outside the band", (4.0 + 5 * BOUNDARY_EPS, 1.0)),
    ]:
        print(f"  {label:32s} inside={point_in_convex_hull(p, h)}")


if __name__ == "__main__":
    main()
