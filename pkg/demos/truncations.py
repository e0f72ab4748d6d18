"""Truncated shift examples: unbounded growth in an A-seminorm."""
from semiop.verify import demo_ex01, demo_shift_z


def main():
    pair = demo_ex01(8)
    print("backward shift against a factorial weight")
    print("  " + "  ".join(pair.columns))
    for row in pair.table:
        print("  " + "  ".join(f"{v:.6g}" for v in row))
    print("  certificates:", pair.certificates)

    pair = demo_shift_z(6)
    print("weighted shift on a truncated sequence space")
    print("  " + "  ".join(pair.columns))
    for row in pair.table:
        print("  " + "  ".join(f"{v:.6g}" for v in row))


if __name__ == "__main__":
    main()
