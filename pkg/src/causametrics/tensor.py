"""Dense complex-matrix algebra over labeled tensor factors.

Operators are plain ``numpy`` complex arrays. Multi-system operators carry a
:class:`Factorization` listing their tensor factors in order; the leftmost
factor is the most significant index of the computational basis.

Choi operators use the unnormalized convention

    C = sum_ij |i><j| (x) N(|i><j|)

with the input factor first, so a trace-preserving map has Tr_out C = I_in.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class Factorization:
    """Ordered tensor factors ``((label, dim), ...)`` of an operator."""

    systems: tuple[tuple[str, int], ...]

    def __init__(self, systems: Iterable[tuple[str, int]]):
        systems = tuple((str(label), int(dim)) for label, dim in systems)
        labels = [label for label, _ in systems]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in factorization: {labels}")
        if any(dim < 1 for _, dim in systems):
            raise ValueError(f"dimensions must be positive: {systems}")
        object.__setattr__(self, "systems", systems)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.systems)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def __len__(self):
        return len(self.systems)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown system label {label!r}; have {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.systems[self.index(label)][1]

    def without(self, labels: Iterable[str]) -> "Factorization":
        drop = set(labels)
        return Factorization(s for s in self.systems if s[0] not in drop)

    def select(self, labels: Sequence[str]) -> "Factorization":
        return Factorization((label, self.dim(label)) for label in labels)

    def relabel(self, mapping: dict[str, str]) -> "Factorization":
        return Factorization((mapping.get(label, label), dim) for label, dim in self.systems)

    def __add__(self, other: "Factorization") -> "Factorization":
        return Factorization(self.systems + other.systems)


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    return M


def _require_square(M: np.ndarray):
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"square matrix required, got shape {M.shape}")


def _check_factorization(M: np.ndarray, f: Factorization):
    _require_square(M)
    if f.total != M.shape[0]:
        raise ValueError(
            f"factorization {f.systems} has total dimension {f.total}, matrix is {M.shape[0]}"
        )


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def kron_all(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for op in ops:
        out = np.kron(out, as_matrix(op))
    return out


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def identity_vector(dim: int) -> np.ndarray:
    """Unnormalized vector sum_i |i>|i> (the Choi vector of the identity)."""
    return np.eye(dim, dtype=np.complex128).reshape(-1)


def max_entangled(m: int) -> np.ndarray:
    """Normalized projector onto (1/sqrt m) sum_i |ii>."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return projector(identity_vector(m)) / m


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


def partial_trace(M, f: Factorization, discard: Iterable[str]) -> np.ndarray:
    """Trace out the factors named in ``discard``; the rest keep their order."""
    M = as_matrix(M)
    _check_factorization(M, f)
    discard = set(discard)
    for label in discard:
        f.index(label)
    n = len(f)
    tensor = M.reshape(f.dims + f.dims)
    row = list(range(n))
    col = list(range(n, 2 * n))
    keep = []
    for k, label in enumerate(f.labels):
        if label in discard:
            col[k] = row[k]
        else:
            keep.append(k)
    out_idx = [row[k] for k in keep] + [col[k] for k in keep]
    out = np.einsum(tensor, row + col, out_idx)
    kept = int(np.prod([f.dims[k] for k in keep], dtype=np.int64))
    return out.reshape(kept, kept)


def permute(M, f: Factorization, order: Sequence[str]) -> np.ndarray:
    """Reorder the tensor factors of ``M`` to ``order``."""
    M = as_matrix(M)
    _check_factorization(M, f)
    if sorted(order) != sorted(f.labels):
        raise ValueError(f"order {list(order)} is not a permutation of {f.labels}")
    n = len(f)
    perm = [f.index(label) for label in order]
    tensor = M.reshape(f.dims + f.dims).transpose(perm + [p + n for p in perm])
    return tensor.reshape(M.shape)


def partial_transpose(M, f: Factorization, labels: Iterable[str]) -> np.ndarray:
    M = as_matrix(M)
    _check_factorization(M, f)
    n = len(f)
    axes = list(range(2 * n))
    for label in labels:
        k = f.index(label)
        axes[k], axes[k + n] = axes[k + n], axes[k]
    return M.reshape(f.dims + f.dims).transpose(axes).reshape(M.shape)


def link(A, fa: Factorization, B, fb: Factorization) -> tuple[np.ndarray, Factorization]:
    """Link product of two operators over their shared labels.

    For shared systems s this is Tr_s[A^{T_s} B]; unshared factors are kept,
    A's before B's. Contracting a Choi operator with a state, two Chois with
    each other, or local instruments with a process matrix are all instances.
    """
    A = as_matrix(A)
    B = as_matrix(B)
    _check_factorization(A, fa)
    _check_factorization(B, fb)
    shared = [label for label in fa.labels if label in fb]
    for label in shared:
        if fa.dim(label) != fb.dim(label):
            raise ValueError(f"system {label!r} has dimension {fa.dim(label)} vs {fb.dim(label)}")
    letters = {}

    def idx(label, side):
        key = (label, side)
        if key not in letters:
            letters[key] = len(letters)
        return letters[key]

    a_sub = [idx(l, "r") for l in fa.labels] + [idx(l, "c") for l in fa.labels]
    b_sub = [idx(l, "r") for l in fb.labels] + [idx(l, "c") for l in fb.labels]
    keep_a = [l for l in fa.labels if l not in shared]
    keep_b = [l for l in fb.labels if l not in shared]
    out_labels = keep_a + keep_b
    out_sub = [idx(l, "r") for l in out_labels] + [idx(l, "c") for l in out_labels]
    out = np.einsum(
        A.reshape(fa.dims + fa.dims), a_sub, B.reshape(fb.dims + fb.dims), b_sub, out_sub,
        optimize=True,
    )
    f_out = Factorization([(l, fa.dim(l)) for l in keep_a] + [(l, fb.dim(l)) for l in keep_b])
    side = f_out.total
    return np.asarray(out).reshape(side, side), f_out


def choi(kraus: Sequence, d_in: int, d_out: int) -> np.ndarray:
    """Unnormalized Choi operator of the map rho -> sum_k K rho K^dag."""
    C = np.zeros((d_in * d_out, d_in * d_out), dtype=np.complex128)
    for K in kraus:
        K = as_matrix(K)
        if K.shape != (d_out, d_in):
            raise ValueError(f"Kraus operator shape {K.shape}, expected {(d_out, d_in)}")
        # column (i, o) of the Choi vector is K[o, i]
        v = K.T.reshape(-1)
        C += np.outer(v, v.conj())
    return C


def apply_channel(C, rho, d_in: int, d_out: int) -> np.ndarray:
    """Apply the map with Choi ``C`` to ``rho``: Tr_in[(rho^T (x) I) C]."""
    C = as_matrix(C).reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ji,jaib->ab", as_matrix(rho), C)


def is_hermitian(M, tol: float = HERMITIAN_TOL) -> bool:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol * scale)


def min_eigenvalue(M, tol: float = HERMITIAN_TOL) -> float:
    M = as_matrix(M)
    _require_square(M)
    if not is_hermitian(M, tol):
        raise ValueError("min_eigenvalue requires a Hermitian matrix")
    H = (M + M.conj().T) / 2
    return float(np.linalg.eigvalsh(H)[0])


def is_psd(M, tol: float = HERMITIAN_TOL) -> bool:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1] or not is_hermitian(M, tol):
        return False
    return min_eigenvalue(M, tol) >= -tol


def fidelity_pure(target, state, tol: float = 1e-9) -> float:
    """Overlap <phi|state|phi> with a rank-one density operator |phi><phi|."""
    target = as_matrix(target)
    state = as_matrix(state)
    _require_square(target)
    if target.shape != state.shape:
        raise ValueError(f"shape mismatch: {target.shape} vs {state.shape}")
    if not is_hermitian(target, tol):
        raise ValueError("target must be Hermitian")
    evals = np.linalg.eigvalsh((target + target.conj().T) / 2)
    if abs(evals[-1] - 1) > tol or np.max(np.abs(evals[:-1]), initial=0.0) > tol:
        raise ValueError("target is not a rank-one density operator")
    return float(np.real(np.sum(target.T * state)))


def is_cptp(C, d_in: int, d_out: int, tol: float = 1e-9) -> bool:
    C = as_matrix(C)
    if C.shape != (d_in * d_out, d_in * d_out):
        return False
    marginal = partial_trace(C, Factorization([("in", d_in), ("out", d_out)]), ["out"])
    return is_psd(C, tol) and bool(np.max(np.abs(marginal - np.eye(d_in))) <= tol)


def hermitian_basis(dim: int, traceless: bool = False) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) Hermitian basis of L(C^dim).

    Symmetric and antisymmetric matrix units for i < j, then diagonal
    elements: generalized Gell-Mann diagonals when ``traceless``, else the
    diagonal units. Order is deterministic.
    """
    basis = []
    for i in range(dim):
        for j in range(i + 1, dim):
            S = np.zeros((dim, dim), dtype=np.complex128)
            S[i, j] = S[j, i] = 1 / np.sqrt(2)
            basis.append(S)
            A = np.zeros((dim, dim), dtype=np.complex128)
            A[i, j] = -1j / np.sqrt(2)
            A[j, i] = 1j / np.sqrt(2)
            basis.append(A)
    if traceless:
        for k in range(1, dim):
            D = np.zeros((dim, dim), dtype=np.complex128)
            D[np.arange(k), np.arange(k)] = 1
            D[k, k] = -k
            basis.append(D / np.sqrt(k * (k + 1)))
    else:
        for i in range(dim):
            D = np.zeros((dim, dim), dtype=np.complex128)
            D[i, i] = 1
            basis.append(D)
    return basis


def channel_directions(d_in: int, d_out: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of {Delta on in(x)out : Tr_out Delta = 0}.

    These span the directions of the affine hull of CPTP Choi operators.
    """
    return [np.kron(H, G) for H in hermitian_basis(d_in) for G in hermitian_basis(d_out, traceless=True)]


def matrix_to_json(M) -> dict:
    M = as_matrix(M)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if rows < 1 or cols < 1 or len(entries) != rows * cols:
        raise ValueError(f"matrix JSON needs {rows}x{cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return flat.reshape(rows, cols)
