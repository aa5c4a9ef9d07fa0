"""
Battlefield motion model and landmark-based localization.

Steers an entity from rest toward a target off its heading, with bounded
acceleration and turn rate, then ranges a landmark triangle and reports
the error of the resulting position fixes.
"""
import math

import numpy as np

from secnav.geometry import Point2
from secnav.localization import Landmark, MeasurementNoise, lanbloc_fix
from secnav.motion import ControlInput, EntityState, MotionParams, compute_control, step


def main():
    params = MotionParams()
    s = EntityState(Point2(0.0, 0.0), 0.0, 0.0)
    target = (40.0, 30.0)
    print("step     x       y      v   heading")
    for k in range(12):
        u, _ = compute_control(s, target, 4.0, params)
        s = step(s, u, params)
        print(f"{k + 1:4d} {s.x:7.2f} {s.y:7.2f} {s.velocity:6.2f} {math.degrees(s.heading):8.1f}")

    # one landmark triangle, fixes with and without ranging noise
    lms = [Landmark(0, Point2(0.0, 0.0), 0), Landmark(1, Point2(40.0, 0.0), 0), Landmark(2, Point2(20.0, 35.0), 0)]
    truth = (17.0, 11.0)
    print("\nnoiseless fix:", lanbloc_fix(truth, lms, 100.0, MeasurementNoise.zero()))
    rng = np.random.default_rng(0)
    noise = MeasurementNoise()
    err = np.array([np.subtract(lanbloc_fix(truth, lms, 100.0, noise, rng), truth) for _ in range(2000)])
    rmse = np.sqrt(np.mean(err**2, axis=0))
    print(f"range sigma {noise.sigma_range} m -> per-axis RMSE x {rmse[0]:.4f} m, y {rmse[1]:.4f} m")


if __name__ == "__main__":
    main()
