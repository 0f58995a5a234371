"""Relative s-perimeters as s -> 0 and the tail functional that governs them.

For a bounded set the limit is twice its measure inside Omega.  For a half
line the heat mass escaping to infinity splits evenly, so Xi = 1/2, and for
an unbalanced Omega the value of Xi can be read back from the limit.
"""

from nplab import HeatKernel, RootSystemSpec, WeightedMeasure
from nplab.perimeter import converse_xi_recover, relative_limit_verify, xi_estimate
from nplab.regions import half_line, interval


def main():
    gauss = HeatKernel(WeightedMeasure(RootSystemSpec.trivial(1)))
    dunkl = HeatKernel(WeightedMeasure(RootSystemSpec.z2(0.5)))
    omega = interval(-1.0, 1.0)
    for name, kernel in (("Gaussian", gauss), ("Z2, kappa=1/2", dunkl)):
        for label, E in (("(-1/2, 1/2)", interval(-0.5, 0.5)), ("(0, inf)", half_line(0.0))):
            rep = relative_limit_verify(kernel, E, omega)
            print(f"{name:14s} E = {label:11s}  s*Per -> {rep['limit']:.5f}  target {rep['target']:.5f}"
                  f"  Xi_E = {rep['xi_E']:.4f}  Xi_E + Xi_Ec = {rep['xi_sum']:.4f}")
    print("Xi of the half line from its tail functional:", round(xi_estimate(gauss, half_line(0.0)).xi, 5))
    rec = converse_xi_recover(gauss, half_line(0.0), interval(-2.0, 1.0))
    print(f"recovered from the perimeter limit on (-2, 1): {rec['recovered']:.5f}"
          f" (direct {rec['direct']:.5f}; boundary exponent {rec['boundary'].eta:.3f})")


if __name__ == "__main__":
    main()
