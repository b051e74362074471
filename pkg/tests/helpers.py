"""Shared builders for the test suite."""

import numpy as np

from quiddsim import gates
from quiddsim.circuit import (
    AmplitudeInit,
    BasisInit,
    Circuit,
    Measure,
    MixtureInit,
)

ONE_QUBIT = (gates.h, gates.x, gates.y, gates.z, gates.s, gates.t)


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_initial(rng, n_qubits):
    dim = 1 << n_qubits
    pick = int(rng.integers(0, 4))
    if pick == 0:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return AmplitudeInit(tuple(v))
    if pick == 1:
        terms = tuple(
            (float(rng.uniform(0.1, 1.0)), int(rng.integers(0, dim)))
            for _ in range(int(rng.integers(1, 4))))
        return MixtureInit(terms)
    return BasisInit(int(rng.integers(0, dim)))


def random_circuit(rng, n_qubits, depth, with_measures=True):
    """Draw from the whole gate library plus channels and measures."""
    c = Circuit(n_qubits, initial=random_initial(rng, n_qubits))
    for _ in range(depth):
        roll = rng.random()
        qs = [int(q) for q in rng.permutation(n_qubits)]
        if roll < 0.55 or n_qubits < 2:
            kind = int(rng.integers(0, len(ONE_QUBIT) + 1))
            if kind == len(ONE_QUBIT):
                c.ops.append(gates.u1(qs[0], random_unitary(rng, 2)))
            else:
                c.ops.append(ONE_QUBIT[kind](qs[0]))
        elif roll < 0.80:
            kind = int(rng.integers(0, 4))
            if kind == 0:
                c.ops.append(gates.cnot(qs[0], qs[1]))
            elif kind == 1:
                c.ops.append(gates.swap(qs[0], qs[1]))
            elif kind == 2 and n_qubits >= 3:
                c.ops.append(gates.toffoli(qs[0], qs[1], qs[2]))
            else:
                pol = int(rng.integers(0, 2))
                c.ops.append(gates.controlled(
                    gates.u1(qs[1], random_unitary(rng, 2)), [(qs[0], pol)]))
        elif roll < 0.92:
            p = float(rng.uniform(0.0, 0.3))
            make = gates.bit_flip if rng.random() < 0.5 else gates.phase_flip
            c.ops.append(make(qs[0], p))
        elif with_measures:
            c.ops.append(Measure(qs[0], sample=bool(rng.random() < 0.4)))
        else:
            c.ops.append(gates.h(qs[0]))
    return c
