# How far the diagrams compress structured states and operators.
#
# A density matrix over n qubits has 4^n entries. States with repeated
# block structure collapse to a handful of shared nodes: the equal
# superposition is ONE node at any width, and the n-fold Hadamard
# operator grows by a constant four nodes per qubit.

from quiddsim import gates
from quiddsim.linalg import (
    from_dense,
    new_manager,
    outer_product,
    tensor,
    uniform_superposition,
)


def main():
    print(f"{'n':>3} {'dense entries':>14} {'uniform rho':>12} {'H^n op':>7}")
    mgr = new_manager(20)
    h1 = from_dense(new_manager(10), gates.PAYLOADS["h"])
    h_op = h1
    for n in range(1, 21):
        rho = outer_product(uniform_superposition(mgr, n))
        h_nodes = "-"
        if 2 <= n <= 10:
            h_op = tensor(h_op, h1)
            h_nodes = h_op.node_count
        print(f"{n:>3} {4 ** n:>14} {rho.node_count:>12} {h_nodes:>7}")

    print()
    print("A Bell pair is less regular, but still tiny:")
    from quiddsim.circuit import run, Circuit
    bell = run(Circuit(2, ops=[gates.h(0), gates.cnot(0, 1)])).rho
    print(f"  nodes={bell.node_count} (dense would store 16 complex entries)")


if __name__ == "__main__":
    main()
