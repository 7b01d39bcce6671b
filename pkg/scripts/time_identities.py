"""Wall-clock cost of the exhaustive minor-identity tiers, to see how far n can be pushed."""
import argparse
import time

from anisotropy.pp_identity import verify_c_bridge, verify_second_derivative_vanishing, verify_thm_simplest


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--max-j", type=int, default=5)
    a = p.parse_args()
    for n in range(1, a.max_n + 1):
        for name, fn in [("derivative", lambda: verify_thm_simplest(n, a.max_j)),
                         ("second-derivative", lambda: verify_second_derivative_vanishing(n, a.max_j)),
                         ("c-bridge", lambda: verify_c_bridge(n, 3))]:
            t0 = time.perf_counter()
            r = fn()
            print(f"n={n} {name:18s} {r.passed}/{r.checks} {time.perf_counter() - t0:8.2f}s", flush=True)


if __name__ == "__main__":
    main()
