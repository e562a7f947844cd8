"""Dense spectral computations with reproducible eigenvalue ordering.

Eigenvalues of a (possibly non-normal) complex matrix are computed with the
dense LAPACK solver, so algebraic multiplicities come for free: an n x n
matrix always yields exactly n values.  Values are arranged in decreasing
order of absolute value; ties in modulus (after rounding to 12 significant
digits) are broken by argument in [0, 2*pi) ascending, then by real part
descending, so the sequence is a pure function of the matrix.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EigensolverError
from .sequences import ScalarSequence, round_sig

__all__ = [
    "EigenSequence",
    "matrix_fingerprint",
    "validate_matrix",
    "eigenvalue_sequence",
    "singular_sequence",
    "hermitian_split",
    "pencil",
    "abs_operator",
    "direct_sum",
]


def matrix_fingerprint(m: np.ndarray) -> str:
    """Short stable hash of the matrix bytes, for error reports and logs."""
    data = np.ascontiguousarray(m, dtype=np.complex128)
    return hashlib.sha1(data.tobytes()).hexdigest()[:12]


def validate_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("matrix entries must be finite")
    return arr


def _canonical_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting eigenvalues by the deterministic convention."""
    mod = round_sig(np.abs(values))
    arg = np.angle(values)
    arg = np.where(arg < 0, arg + 2 * np.pi, arg)
    # lexsort: last key is primary
    return np.lexsort((-values.real, arg, -mod))


@dataclass(frozen=True)
class EigenSequence:
    """Eigenvalues in canonical order, zero-padded beyond ``logical_length``."""

    values: np.ndarray
    logical_length: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if self.logical_length < vals.size:
            raise ValueError("logical_length shorter than stored values")
        mods = round_sig(np.abs(vals))
        if vals.size > 1 and np.any(np.diff(mods) > 0):
            raise ValueError("moduli must be nonincreasing")

    @classmethod
    def from_values(cls, values, logical_length: int | None = None) -> "EigenSequence":
        vals = np.asarray(values, dtype=np.complex128).ravel()
        vals = vals[_canonical_order(vals)]
        if logical_length is None:
            logical_length = vals.size
        return cls(vals, logical_length)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    def partial_sums(self) -> np.ndarray:
        """lambda_1 + ... + lambda_n for n = 1..len(values), in stored order."""
        return np.cumsum(self.values)

    def scaled(self, alpha: complex) -> "EigenSequence":
        if alpha == 0:
            return EigenSequence(np.zeros_like(self.values), self.logical_length)
        return EigenSequence(self.values * alpha, self.logical_length)


def eigenvalue_sequence(m) -> EigenSequence:
    """Eigenvalues of a dense complex matrix, canonical order, multiplicities included."""
    arr = validate_matrix(m)
    try:
        vals = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(matrix_fingerprint(arr), str(exc)) from exc
    return EigenSequence.from_values(vals, arr.shape[0])


def singular_sequence(m) -> ScalarSequence:
    """Singular values (eigenvalues of (T*T)^(1/2)) in nonincreasing order."""
    arr = validate_matrix(m)
    try:
        s = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(matrix_fingerprint(arr), str(exc)) from exc
    return ScalarSequence(np.sort(s)[::-1])


def hermitian_split(t) -> tuple[np.ndarray, np.ndarray]:
    """Split T = H + iK with H = (T + T*)/2 and K = (T - T*)/(2i)."""
    arr = validate_matrix(t)
    h = (arr + arr.conj().T) / 2.0
    k = (arr - arr.conj().T) / 2.0j
    return h, k


def pencil(t, z: complex) -> np.ndarray:
    """The operator pencil (T + z*T*)/2."""
    arr = validate_matrix(t)
    return (arr + z * arr.conj().T) / 2.0


def abs_operator(t) -> np.ndarray:
    """Positive semidefinite square root of T*T.

    Computed via the hermitian eigendecomposition of T*T with negative
    rounding-error eigenvalues clamped to 0, so the result is exactly PSD.
    """
    arr = validate_matrix(t)
    gram = arr.conj().T @ arr
    gram = (gram + gram.conj().T) / 2.0
    try:
        w, v = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(matrix_fingerprint(arr), str(exc)) from exc
    w = np.sqrt(np.clip(w, 0.0, None))
    out = (v * w) @ v.conj().T
    return (out + out.conj().T) / 2.0


def direct_sum(a, b) -> np.ndarray:
    """Block-diagonal direct sum; the eigenvalue multiset is the union."""
    a = validate_matrix(a)
    b = validate_matrix(b)
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = a
    out[n:, n:] = b
    return out
