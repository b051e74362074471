"""Round trip through the .qpd language from Python.

Builds a source string, parses it, pretty-prints the canonical form,
lowers it to a circuit, runs it, and walks the per-step report.
"""

from quiddsim.circuit import run
from quiddsim.lang import interpret, parse, pretty

SOURCE = """
qubits 3
init mix 0.9 |000> 0.1 |111>

h 0                    # spread the top wire
cu [ 0 ] h 1           # conditional mixing
cnot 1 2
phaseflip 2 0.05       # a little dephasing
measure 0
print probs 2
print trace
ptrace 0               # drop the top wire, others renumber
print nodes
"""


def main():
    script = parse(SOURCE)
    print("canonical form:")
    print(pretty(script))

    circuit = interpret(script)
    result = run(circuit, seed=4)

    print("probe output:")
    for step, text in result.stats.prints:
        print(f"  step {step}: {text}")
    for rec in result.records:
        print(f"  step {rec.step}: measured wire {rec.qubit}, "
              f"p0={rec.p0:.6f} p1={rec.p1:.6f}")

    stats = result.stats
    print(f"\nfinal width {result.rho.n_qubits} qubits, "
          f"peak {stats.peak_nodes} nodes, {stats.wall_ms:.2f} ms")
    for s in stats.steps:
        print(f"  {s.step:>2} {s.op:<28} nodes={s.nodes}")


if __name__ == "__main__":
    main()
