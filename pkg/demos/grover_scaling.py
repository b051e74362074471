"""Search-circuit scaling: diagram engine vs explicit arrays.

The dense engine stores 16 * 4^n bytes per state and gives up past its
size cap; the diagram engine's peak node count creeps up far more
slowly. This prints both sweeps side by side. Expect the dense column
to read OVER-CAP from 12 qubits on.
"""

import sys

from quiddsim.bench import NODE_BYTES, scaling_harness


def main():
    lo, hi = 5, 13
    if len(sys.argv) > 1:
        hi = int(sys.argv[1])

    quidd = scaling_harness("grover", range(lo, hi + 1))
    dense = scaling_harness("grover", range(lo, hi + 1), engine="dense")

    print(f"{'n':>3} {'gates':>6} | {'quidd ms':>9} {'peak nodes':>10} "
          f"{'bytes':>9} | {'dense ms':>9} {'bytes':>12}")
    for q, d in zip(quidd, dense):
        q_bytes = q.peak_nodes * NODE_BYTES
        if d.status == "OVER-CAP":
            d_cell = f"{'OVER-CAP':>9} {'OVER-CAP':>12}"
        else:
            d_cell = f"{d.wall_ms:>9.1f} {d.peak_bytes:>12}"
        print(f"{q.n:>3} {q.gates:>6} | {q.wall_ms:>9.1f} "
              f"{q.peak_nodes:>10} {q_bytes:>9} | {d_cell}")


if __name__ == "__main__":
    main()
