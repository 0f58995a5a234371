"""Numerical checks of basic Dunkl heat-kernel facts on the line."""

import numpy as np

from nplab import HeatKernel, RootSystemSpec, WeightedMeasure
from nplab.heat import completeness_check, kernel_eval, semigroup_check, ultracontractivity_exponent


def main():
    for kappa in (0.25, 0.5, 1.0):
        k = HeatKernel(WeightedMeasure(RootSystemSpec.z2(kappa)))
        comp = completeness_check(k, [0.1, 1.0, 10.0], np.linspace(-3, 3, 13))["max_deviation"]
        semi = semigroup_check(k, 20, seed=0)["max_rel_deviation"]
        ultra = ultracontractivity_exponent(k, None, 1, np.geomspace(1, 1e3, 7))
        print(f"kappa={kappa:<5} |int p_t - 1| <= {comp:.1e}   semigroup dev {semi:.1e}   "
              f"L1->Linf slope {ultra['slope']:+.4f} (expected {ultra['expected']:+.4f})")
    k = HeatKernel(WeightedMeasure(RootSystemSpec.z2(0.5)))
    print("p_1(1, y) for y = -1, 0, 1:", [round(kernel_eval(k, 1.0, 1.0, y), 6) for y in (-1.0, 0.0, 1.0)])


if __name__ == "__main__":
    main()
