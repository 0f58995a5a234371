"""Box counting on the Weierstrass graph and the boundary-layer exponent of a
planar domain whose upper edge is that graph."""

import math

import numpy as np

from nplab import HeatKernel, RootSystemSpec, WeightedMeasure
from nplab.fractal import WeierstrassSpec, box_count_dimension, boundary_condition_fit, weierstrass_eval
from nplab.regions import weierstrass_domain


def main():
    spec = WeierstrassSpec(a=0.5, b=3.0, terms=16)
    res = box_count_dimension(lambda x: weierstrass_eval(spec, x), (0.0, 1.0))
    print(f"{'delta':>12} {'boxes':>10}")
    for delta, count, _ in res.rows():
        print(f"{delta:12.3e} {count:10d}")
    print(f"box dimension {res.dimension:.4f}   expected {spec.graph_dimension:.4f}")

    plane = WeightedMeasure(RootSystemSpec.trivial(2))
    fit = boundary_condition_fit(weierstrass_domain(0.5, 3.0, 16), plane, r_grid=np.geomspace(1e-3, 1e-1, 9))
    print(f"boundary layer mu(D_r) ~ {fit.c_star:.3f} r^{fit.eta:.4f}   expected exponent {math.log(2, 3):.4f}")


if __name__ == "__main__":
    main()
