#!/usr/bin/env python3
"""Watch the symmetric urn pick a sign.

Starting from {-1, 1}, the scaled mean a_n = S_n / (n (n+1)) converges to a
random limit, and the urn's labels end up almost all on one side of zero.
Different realization indices land on different sides with different
magnitudes; rerun with another seed to see the variety.
"""

from zurn import RngStream, compute_a, new_urn, run, sign_concentration

SEED = 7


def main():
    print(f"{'realization':>11} {'final a_n':>12} {'sign conc.':>10}  trajectory of a_n")
    for realization in range(6):
        urn = new_urn([-1, 1])
        trace = []
        run(
            urn,
            4998,
            RngStream(SEED, realization),
            checkpoints=[10, 100, 1000, 5000],
            recorder=lambda snap: trace.append(snap.a[0]),
        )
        conc = sign_concentration(urn).fraction
        path = " -> ".join(f"{a:+.4f}" for a in trace)
        print(f"{realization:>11} {compute_a(urn)[0]:>+12.5f} {conc:>10.3f}  {path}")
    print()
    print("Each realization walks to its own limit; the label signs follow it.")


if __name__ == "__main__":
    main()
