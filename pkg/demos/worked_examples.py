"""Radii and class flags for the registry of small worked examples."""
import numpy as np

from semiop import analyze, classify_full, make_context
from semiop.verify import paper_registry


def main():
    np.set_printoptions(precision=4, suppress=True)
    for entry in paper_registry():
        ctx = make_context(entry.A)
        rep = analyze(ctx, entry.T)
        cls = classify_full(ctx, entry.T)
        print(f"== {entry.name}")
        print(f"   norm_A={rep.a_norm}  omega_A={rep.a_numerical_radius}  r_A={rep.a_spectral_radius}")
        flags = {k: v for k, v in cls.as_dict().items() if isinstance(v, bool)}
        print("   " + "  ".join(f"{k}={v}" for k, v in flags.items()))


if __name__ == "__main__":
    main()
