"""Ground-truth references: exhaustive and random search over the lattice.

These are deliberately naive. The exhaustive searches enumerate every one of
the 2^(nB) configurations (guarded to keep runs desk-scale) and exist so the
clever solvers have something unarguable to be checked against. Ties resolve
to the first hit in lexicographic index order, most significant digit first,
so expected values in tests are unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DiscretePhaseSet, PhaseVector, Rng, as_complex_matrix, as_complex_vector, normalize_p
from .errors import InvalidArgumentError, SizeLimitError

#: refuse exhaustive enumerations beyond 2^24 configurations
MAX_EXHAUSTIVE_BITS = 24

_CHUNK = 1 << 14


@dataclass(frozen=True)
class OracleResult:
    phases: PhaseVector
    objective: float
    evaluated: int


def _guard(n: int, dps: DiscretePhaseSet) -> int:
    total_bits = n * dps.bits
    if total_bits > MAX_EXHAUSTIVE_BITS:
        raise SizeLimitError(
            f"exhaustive search over 2^{total_bits} configurations exceeds the "
            f"2^{MAX_EXHAUSTIVE_BITS} guard")
    return 1 << total_bits


def _decode(flat: np.ndarray, n: int, levels: int) -> np.ndarray:
    """Mixed-radix digits of flat indices, most significant digit first."""
    digits = np.empty((flat.size, n), dtype=np.int64)
    rem = flat.copy()
    for pos in range(n - 1, -1, -1):
        digits[:, pos] = rem % levels
        rem //= levels
    return digits


def exhaustive_inner(v, dps: DiscretePhaseSet) -> OracleResult:
    """Maximum of |<v, exp(j*Omega)>| by enumerating all of Delta^n."""
    v = as_complex_vector(v)
    total = _guard(v.size, dps)
    phase_table = np.exp(1j * dps.values)

    # grow the sum one element at a time; axis order keeps element 0 the
    # most significant digit of the flat index
    sums = np.zeros(1, dtype=np.complex128)
    for coeff in np.conj(v):
        sums = (sums[:, None] + coeff * phase_table[None, :]).ravel()
    best_flat = int(np.argmax(np.abs(sums)))
    objective = float(np.abs(sums[best_flat]))

    idx = _decode(np.array([best_flat]), v.size, dps.levels)[0]
    return OracleResult(PhaseVector.from_indices(idx, dps), objective, total)


def exhaustive_norm(a, dps: DiscretePhaseSet, p) -> OracleResult:
    """Maximum of ||A exp(j*Omega)||_p by enumerating all of Delta^n."""
    a = as_complex_matrix(a)
    p = normalize_p(p)
    n = a.shape[1]
    total = _guard(n, dps)
    at = a.T.copy()

    best_val = -1.0
    best_flat = -1
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = _decode(flat, n, dps.levels)
        x = np.exp(1j * dps.step * digits)
        y = x @ at
        if p == 1.0:
            vals = np.abs(y).sum(axis=1)
        elif p == 2.0:
            vals = np.linalg.norm(y, axis=1)
        else:
            vals = np.abs(y).max(axis=1)
        local = int(np.argmax(vals))
        if vals[local] > best_val:
            best_val = float(vals[local])
            best_flat = int(flat[local])
    idx = _decode(np.array([best_flat]), n, dps.levels)[0]
    return OracleResult(PhaseVector.from_indices(idx, dps), best_val, total)


def random_search(a, dps: DiscretePhaseSet, p, trials: int, rng: Rng) -> OracleResult:
    """Best objective among `trials` uniform random lattice configurations."""
    a = as_complex_matrix(a)
    p = normalize_p(p)
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    n = a.shape[1]
    at = a.T.copy()
    g = rng.generator

    best_val = -1.0
    best_idx: np.ndarray | None = None
    remaining = trials
    while remaining > 0:
        batch = min(remaining, _CHUNK)
        digits = g.integers(0, dps.levels, size=(batch, n))
        y = np.exp(1j * dps.step * digits) @ at
        if p == 1.0:
            vals = np.abs(y).sum(axis=1)
        elif p == 2.0:
            vals = np.linalg.norm(y, axis=1)
        else:
            vals = np.abs(y).max(axis=1)
        local = int(np.argmax(vals))
        if vals[local] > best_val:
            best_val = float(vals[local])
            best_idx = digits[local].copy()
        remaining -= batch
    assert best_idx is not None
    return OracleResult(PhaseVector.from_indices(best_idx, dps), best_val, trials)
