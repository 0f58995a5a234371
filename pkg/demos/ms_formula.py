"""Small-s behaviour of the heat-semigroup Besov seminorm.

Prints ``s * N_{s,1}(1_(0,1))`` along a grid of ``s`` for the Gaussian kernel
and for the reflection group on the line with multiplicity 1/2, followed by
the extrapolated ``s -> 0`` value and the target ``4 ||f||_1``.
"""

import math

from nplab import HeatKernel, RootSystemSpec, WeightedMeasure
from nplab.fields import indicator
from nplab.seminorm import SeminormRequest, besov, ms_limit


def main():
    f = indicator(0.0, 1.0)
    for label, spec in (("Gaussian", RootSystemSpec.trivial(1)), ("Z2, kappa=1/2", RootSystemSpec.z2(0.5))):
        kernel = HeatKernel(WeightedMeasure(spec))
        print(f"{label}")
        for s in (0.4, 0.2, 0.1, 0.05):
            val = besov(SeminormRequest(f, 1, s, kernel)).power
            print(f"  s = {s:<5}  s * N = {s * val:.6f}")
        est = ms_limit(f, 1, kernel)
        print(f"  limit {est.limit:.6f}   target {est.target:.6f}   rel err {est.relative_error:.1e}")
    print(f"(2 sqrt 2 = {2 * math.sqrt(2):.6f})")


if __name__ == "__main__":
    main()
