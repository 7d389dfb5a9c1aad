"""Universal-share (n, n+1) multi-secret sharing of binary images.

Encryption runs one (n+1)-qubit circuit per pixel: qubit 0 is put into
superposition by a Hadamard (the universal-share bit), qubits 1..n are
loaded with the n secret bits via X gates, and a CNOT from qubit 0 onto
each secret qubit entangles them.  Measuring collapses the register to one
of two complementary branches, yielding the UniShare bit u and share bits
s_k = g_k XOR u.  Decryption XORs the UniShare back, either directly or
through the receiver-side CNOT circuit.

Pixels are independent, so `encrypt` simulates their statevectors in
vectorized blocks (one 2^(n+1) amplitude row per pixel) instead of looping
`encode_pixel`; both paths draw the same per-pixel random variate and are
bit-identical.  `classical_encrypt` is the plain XOR oracle kept separate
for cross-checking the circuit route.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng
from .imaging import BinaryImage, require_same_shape
from .qsim import (
    INV_SQRT2,
    NORM_TOLERANCE,
    StateError,
    StateVector,
    apply_gate,
    cnot,
    hadamard,
    measure_all,
    new_register,
    pauli_x,
)

MAX_ARITY = 16

# Cap per-block scratch at ~16 MB of amplitudes (2^20 complex128).
_BLOCK_AMPLITUDES = 1 << 20


class ConfigError(ValueError):
    """Invalid scheme configuration (arity out of range, wrong secret count)."""


@dataclass(frozen=True)
class SchemeConfig:
    arity_n: int
    master_seed: int
    verify_with_oracle: bool = False
    use_circuit_decoder: bool = False

    def __post_init__(self):
        if not 1 <= self.arity_n <= MAX_ARITY:
            raise ConfigError(f"arity_n must be in 1..{MAX_ARITY}, got {self.arity_n}")
        object.__setattr__(self, "master_seed", self.master_seed & ((1 << 64) - 1))


@dataclass(frozen=True)
class PixelOutcome:
    """Measured UniShare bit and the n share bits for one pixel."""

    u: int
    s: tuple[int, ...]


@dataclass(frozen=True)
class ShareSet:
    """One UniShare plus the n share images produced by `encrypt`."""

    arity_n: int
    unishare: BinaryImage
    shares: tuple[BinaryImage, ...]
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "shares", tuple(self.shares))
        if self.arity_n < 1 or len(self.shares) != self.arity_n:
            raise ConfigError(
                f"expected {self.arity_n} shares, got {len(self.shares)}"
            )
        for image in (self.unishare, *self.shares):
            if image.width != self.width or image.height != self.height:
                raise ConfigError(
                    f"share set dimensions {self.width}x{self.height} do not match "
                    f"image {image.width}x{image.height}"
                )


def _validated_bits(secret_bits: Sequence[int]) -> tuple[int, ...]:
    g = tuple(int(b) for b in secret_bits)
    if not 1 <= len(g) <= MAX_ARITY:
        raise ConfigError(f"need 1..{MAX_ARITY} secret bits, got {len(g)}")
    if any(b not in (0, 1) for b in g):
        raise ValueError(f"secret bits must be 0 or 1, got {g}")
    return g


def transmitter_state(secret_bits: Sequence[int]) -> StateVector:
    """Pre-measurement state of the encoding circuit for one pixel.

    Support is exactly two complementary basis states, |0, g_1..g_n> and
    |1, not(g_1)..not(g_n)>, each with probability 1/2.
    """
    g = _validated_bits(secret_bits)
    state = new_register(len(g) + 1)
    for j, bit in enumerate(g):
        if bit:
            state = apply_gate(state, pauli_x(j + 1))
    state = apply_gate(state, hadamard(0))
    for j in range(len(g)):
        state = apply_gate(state, cnot(0, j + 1))
    return state


def encode_pixel(secret_bits: Sequence[int], stream: rng.RngStream) -> PixelOutcome:
    """Run the per-pixel circuit once and measure u and s_1..s_n."""
    bits = measure_all(transmitter_state(secret_bits), stream)
    return PixelOutcome(u=int(bits[0]), s=tuple(int(b) for b in bits[1:]))


def decode_pixel(u: int, s_k: int, use_circuit: bool = False) -> int:
    """Recover one secret bit as s_k XOR u, optionally via the receiver circuit."""
    if u not in (0, 1) or s_k not in (0, 1):
        raise ValueError(f"decode_pixel expects bits, got u={u!r} s_k={s_k!r}")
    if use_circuit:
        state = new_register(2)
        if u:
            state = apply_gate(state, pauli_x(0))
        if s_k:
            state = apply_gate(state, pauli_x(1))
        state = apply_gate(state, cnot(0, 1))
        # Basis-state input, so the measurement is deterministic.
        return int(measure_all(state, rng.RngStream(0, 0))[1])
    return u ^ s_k


def _simulate_pixel_block(
    secret_block: np.ndarray, master_seed: int, pixel_indices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Statevector-simulate one encoding circuit per pixel, vectorized.

    secret_block is (n, m) with one column per pixel; returns (u_bits,
    share_bits) with share_bits shaped (n, m).  Mirrors `encode_pixel`
    draw-for-draw: same gate arithmetic, same single uniform variate per
    pixel from stream `pixel_indices[i]`.
    """
    n, m = secret_block.shape
    k = n + 1
    dim = 1 << k
    half = dim >> 1

    amps = np.zeros((m, dim), dtype=np.complex128)
    amps[:, 0] = 1.0

    # X on qubit j+1 for pixels whose secret bit g_j is 1 (basis permutation).
    base = np.arange(dim)
    for j in range(n):
        mask = secret_block[j] == 1
        if mask.any():
            perm = base ^ (1 << (n - 1 - j))
            amps[mask] = amps[np.ix_(mask, perm)]

    # Hadamard on qubit 0 (index bit 2^n splits the two halves).
    lo, hi = amps[:, :half], amps[:, half:]
    amps = np.concatenate(((lo + hi) * INV_SQRT2, (lo - hi) * INV_SQRT2), axis=1)

    # CNOT(control=0, target=j+1): flip the target bit inside the upper half.
    for j in range(n):
        perm = np.where(base >= half, base ^ (1 << (n - 1 - j)), base)
        amps = amps[:, perm]

    probs = np.abs(amps) ** 2
    totals = probs.sum(axis=1)
    if np.any(np.abs(totals - 1.0) > NORM_TOLERANCE):
        raise StateError("simulated pixel state drifted off unit norm")

    # Born sampling, one variate per pixel: two nonzero branches, lower index first.
    nonzero = probs > 0.0
    first = nonzero.argmax(axis=1)
    last = dim - 1 - nonzero[:, ::-1].argmax(axis=1)
    p_first = probs[np.arange(m), first]
    u = rng.unit_array(master_seed, pixel_indices, 0)
    outcome = np.where(u < p_first, first, last)

    u_bits = ((outcome >> n) & 1).astype(np.uint8)
    share_bits = np.empty((n, m), dtype=np.uint8)
    for j in range(n):
        share_bits[j] = (outcome >> (n - 1 - j)) & 1
    return u_bits, share_bits


def _encode_span(
    secret_grid: np.ndarray, master_seed: int, start: int, stop: int,
    u_out: np.ndarray, s_out: np.ndarray,
) -> None:
    n = secret_grid.shape[0]
    block = max(1, _BLOCK_AMPLITUDES >> (n + 1))
    for lo in range(start, stop, block):
        hi = min(lo + block, stop)
        indices = np.arange(lo, hi, dtype=np.uint64)
        u_bits, share_bits = _simulate_pixel_block(
            secret_grid[:, lo:hi], master_seed, indices
        )
        u_out[lo:hi] = u_bits
        s_out[:, lo:hi] = share_bits


def encrypt(
    secrets: Sequence[BinaryImage], config: SchemeConfig, *, threads: int = 1
) -> ShareSet:
    """Encrypt n same-sized secrets into a UniShare plus n share images.

    Pixel p uses RNG stream p, so the result is bit-exact reproducible from
    config.master_seed regardless of `threads`.
    """
    secrets = list(secrets)
    if not secrets:
        raise ConfigError("need at least one secret image")
    if len(secrets) != config.arity_n:
        raise ConfigError(
            f"config.arity_n = {config.arity_n} but {len(secrets)} secrets given"
        )
    for other in secrets[1:]:
        require_same_shape(secrets[0], other)

    width, height = secrets[0].width, secrets[0].height
    num_pixels = width * height
    secret_grid = np.stack([img.bits for img in secrets])

    u_out = np.empty(num_pixels, dtype=np.uint8)
    s_out = np.empty((config.arity_n, num_pixels), dtype=np.uint8)

    if threads <= 1 or num_pixels < 2048:
        _encode_span(secret_grid, config.master_seed, 0, num_pixels, u_out, s_out)
    else:
        bounds = np.linspace(0, num_pixels, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _encode_span, secret_grid, config.master_seed,
                    int(bounds[i]), int(bounds[i + 1]), u_out, s_out,
                )
                for i in range(threads)
            ]
            for future in futures:
                future.result()

    unishare = BinaryImage(width, height, u_out)
    shares = tuple(BinaryImage(width, height, s_out[j]) for j in range(config.arity_n))
    share_set = ShareSet(config.arity_n, unishare, shares, width, height)

    if config.verify_with_oracle:
        expected = classical_encrypt(secrets, unishare)
        if any(got != want for got, want in zip(shares, expected)):
            raise RuntimeError("circuit shares disagree with the XOR oracle")
    return share_set


def classical_encrypt(
    secrets: Sequence[BinaryImage], mask: BinaryImage
) -> list[BinaryImage]:
    """XOR oracle: S_k = G_k XOR mask, pixelwise."""
    secrets = list(secrets)
    for img in secrets:
        require_same_shape(img, mask)
    return [img ^ mask for img in secrets]


def decrypt(
    unishare: BinaryImage, share: BinaryImage, config: SchemeConfig | None = None
) -> BinaryImage:
    """Recover the secret behind `share`; a wrong UniShare just yields noise."""
    require_same_shape(unishare, share)
    if config is not None and config.use_circuit_decoder:
        bits = np.fromiter(
            (
                decode_pixel(int(u), int(s), use_circuit=True)
                for u, s in zip(unishare.bits, share.bits)
            ),
            dtype=np.uint8,
            count=unishare.width * unishare.height,
        )
        return BinaryImage(unishare.width, unishare.height, bits)
    return unishare ^ share


def decrypt_all(
    share_set: ShareSet, config: SchemeConfig | None = None
) -> list[BinaryImage]:
    """Recover every secret, in share order."""
    return [decrypt(share_set.unishare, share, config) for share in share_set.shares]
