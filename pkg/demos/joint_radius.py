"""A-joint spectral radius estimates for a random pair of members."""
import numpy as np

from semiop import a_joint_spectral_radius, a_spectral_radius, make_context
from semiop.verify import random_member, random_weight


def main(seed=5):
    rng = np.random.default_rng(seed)
    ctx = make_context(random_weight(rng, 4, 3))
    S, T = random_member(rng, ctx), random_member(rng, ctx)
    trace = a_joint_spectral_radius(ctx, [S, T], n_max=2**12)
    for n, e in trace.estimates:
        print(f"n={n:5d}  e_n={e:.10f}")
    print("final:", trace.final, "converged:", trace.converged)
    print("single-operator radii:", a_spectral_radius(ctx, S), a_spectral_radius(ctx, T))


if __name__ == "__main__":
    main()
