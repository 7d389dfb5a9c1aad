"""Minimal statevector simulator for small qubit registers.

Conventions used throughout the package:

* Basis index bit order: qubit 0 is the MOST significant bit, so for a
  3-qubit register the basis state |q0 q1 q2> = |110> has index 6.
* Gate set is exactly what the share scheme needs: Pauli-X, Pauli-Z,
  Hadamard, and CNOT, with the standard matrices
  H = (1/sqrt 2) [[1, 1], [1, -1]], X = [[0, 1], [1, 0]], Z = [[1, 0], [0, -1]].
* Measurement samples the Born distribution from a caller-supplied
  RngStream and does not return a collapsed state; registers here are
  single-use.

Registers are capped at 24 qubits (the statevector has 2^k amplitudes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .rng import RngStream

MAX_QUBITS = 24

INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Normalization drift tolerated before measurement refuses a state.
NORM_TOLERANCE = 1e-9


class StateError(ValueError):
    """Raised when a register violates the normalization contract."""


class GateKind(Enum):
    PAULI_X = "x"
    PAULI_Z = "z"
    HADAMARD = "h"
    CNOT = "cnot"


@dataclass(frozen=True)
class GateOp:
    """Symbolic gate instruction; `control` is set only for CNOT."""

    kind: GateKind
    target: int
    control: int | None = None

    def __post_init__(self):
        if self.target < 0:
            raise ValueError(f"negative target qubit {self.target}")
        if self.kind is GateKind.CNOT:
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.control < 0:
                raise ValueError(f"negative control qubit {self.control}")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind.name} takes no control qubit")


def pauli_x(target: int) -> GateOp:
    return GateOp(GateKind.PAULI_X, target)


def pauli_z(target: int) -> GateOp:
    return GateOp(GateKind.PAULI_Z, target)


def hadamard(target: int) -> GateOp:
    return GateOp(GateKind.HADAMARD, target)


def cnot(control: int, target: int) -> GateOp:
    return GateOp(GateKind.CNOT, target, control=control)


@dataclass
class StateVector:
    """Complex amplitudes over the 2^num_qubits basis states.

    Construction checks shape and finiteness but not normalization, so
    tests can build deliberately bad states; `measure_all` enforces the
    norm guard.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        expected = 1 << self.num_qubits
        if self.amplitudes.shape != (expected,):
            raise ValueError(
                f"amplitude vector must have length {expected}, got shape {self.amplitudes.shape}"
            )
        if not np.isfinite(self.amplitudes).all():
            raise ValueError("amplitudes must be finite")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return float(self.probabilities().sum())


def new_register(num_qubits: int) -> StateVector:
    """Fresh register with every qubit in |0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(num_qubits, amplitudes)


def _check_qubit(index: int, num_qubits: int, role: str) -> None:
    if not 0 <= index < num_qubits:
        raise IndexError(f"{role} qubit {index} out of range for {num_qubits}-qubit register")


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Unitary image of `state` under `gate`; the input is left untouched."""
    k = state.num_qubits
    _check_qubit(gate.target, k, "target")
    if gate.control is not None:
        _check_qubit(gate.control, k, "control")

    # Axis j of the reshaped array is qubit j (MSB-first index convention).
    psi = state.amplitudes.reshape([2] * k)

    if gate.kind is GateKind.PAULI_X:
        out = np.flip(psi, axis=gate.target).copy()
    elif gate.kind is GateKind.PAULI_Z:
        out = psi.copy()
        sel: list = [slice(None)] * k
        sel[gate.target] = 1
        out[tuple(sel)] *= -1.0
    elif gate.kind is GateKind.HADAMARD:
        lo: list = [slice(None)] * k
        hi: list = [slice(None)] * k
        lo[gate.target], hi[gate.target] = 0, 1
        a0, a1 = psi[tuple(lo)], psi[tuple(hi)]
        out = np.empty_like(psi)
        out[tuple(lo)] = (a0 + a1) * INV_SQRT2
        out[tuple(hi)] = (a0 - a1) * INV_SQRT2
    else:  # CNOT: flip target within the control=1 subspace
        out = psi.copy()
        sel = [slice(None)] * k
        sel[gate.control] = 1
        sub_target = gate.target - 1 if gate.target > gate.control else gate.target
        out[tuple(sel)] = np.flip(psi[tuple(sel)], axis=sub_target)

    return StateVector(k, out.reshape(-1))


def measure_all(state: StateVector, rng: RngStream) -> str:
    """Sample a full computational-basis outcome, q0 first in the bitstring.

    Consumes exactly one uniform variate: a two-branch pick when at most two
    amplitudes are nonzero (the common case here), inverse-CDF over basis
    order otherwise.
    """
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOLERANCE:
        raise StateError(f"state norm^2 = {total!r} deviates from 1 beyond {NORM_TOLERANCE}")

    support = np.flatnonzero(probs)
    u = rng.next_unit()
    if support.size <= 2:
        first = int(support[0])
        outcome = first if u < probs[first] else int(support[-1])
    else:
        cdf = np.cumsum(probs)
        outcome = int(np.searchsorted(cdf, u, side="right"))
        if outcome > support[-1]:
            outcome = int(support[-1])
    return format(outcome, f"0{state.num_qubits}b")


def nonzero_support(state: StateVector, epsilon: float) -> list[tuple[int, float]]:
    """Basis states with probability strictly above epsilon, sorted by index."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    probs = state.probabilities()
    return [(int(i), float(probs[i])) for i in np.flatnonzero(probs > epsilon)]
