"""
Extended Kalman filter on top of the motion model.

A noisy straight run: raw fixes versus filtered estimates, and the
covariance trace settling once measurements arrive.
"""
import numpy as np

from secnav.ekf import BeliefState, FilterConfig, run_filter, simulate_truth
from secnav.geometry import Point2
from secnav.motion import ControlInput, EntityState, MotionParams, ProcessNoise


def main():
    rng = np.random.default_rng(3)
    params = MotionParams()
    s0 = EntityState(Point2(0.0, 0.0), 2.0, 0.3)
    controls = [ControlInput(2.0, 0.0)] * 300
    truth = simulate_truth(s0, controls, params, ProcessNoise(), rng)
    T = np.array([s.as_vector()[:3] for s in truth])
    sigma = np.array([0.3, 0.3, 0.2])
    Z = T + rng.standard_normal(T.shape) * sigma
    cfg = FilterConfig(R=np.diag(sigma**2))
    est = run_filter(BeliefState.from_state(s0), controls, list(Z), params, cfg)
    E = np.array([b.mean[:2] for b in est])

    raw = np.sqrt(np.mean(np.sum((Z[:, :2] - T[:, :2]) ** 2, axis=1)))
    filt = np.sqrt(np.mean(np.sum((E - T[:, :2]) ** 2, axis=1)))
    print(f"position RMSE: raw fixes {raw:.3f} m, filtered {filt:.3f} m")
    for k in (0, 1, 5, 20, 299):
        print(f"  step {k:3d}: trace(P) = {np.trace(est[k].cov):.4f}")


if __name__ == "__main__":
    main()
