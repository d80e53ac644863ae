"""One-dimensional fractional Brownian motion as the simplest field in the family.

The computed covariance is compared with ``sigma^2/2 (|t|^2h + |s|^2h - |t-s|^2h)``.
"""

import numpy as np

from ofbf import covariance, fbm_spec

points = [-2.0, -0.5, 1.0, 2.0]
for h in (0.25, 0.5, 0.75):
    spec = fbm_spec(h)
    sigma2 = covariance(spec, [1.0], [1.0])[0, 0]
    worst = 0.0
    for s in points:
        for t in points:
            exact = 0.5 * sigma2 * (abs(t) ** (2 * h) + abs(s) ** (2 * h) - abs(t - s) ** (2 * h))
            worst = max(worst, abs(covariance(spec, [s], [t])[0, 0] - exact) / sigma2)
    print(f"h = {h}: sigma^2 = {sigma2:.6f}, worst error relative to sigma^2 {worst:.1e}")

print("sigma^2 at h = 1/2 equals 2 pi:", np.isclose(covariance(fbm_spec(0.5), [1.0], [1.0])[0, 0], 2 * np.pi))
