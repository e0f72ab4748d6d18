"""Run the inequality checks over each random family and print the worst slack."""
from semiop.verify import FAMILIES, EnsembleSpec, verify_ensemble


def main(samples=100, seed=2024):
    for family in FAMILIES:
        rep = verify_ensemble(EnsembleSpec(family, samples, (2, 6), seed=seed))
        print(f"{family:12s} samples={rep.samples:4d} failures={rep.failures}  worst slack={rep.worst_slack:.2e}")


if __name__ == "__main__":
    main()
