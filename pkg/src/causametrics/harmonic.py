"""Harmonic clean models: three causal relations in coherent superposition.

The global vector lives on ``g (x) a1 a2 b1 b2 (x) e1 e2 e3``. Branch 1 sends
a2 to b1 (A before B), branch 2 sends b2 to a1 (B before A), and branch 3
feeds both parties from the seed state with outputs lost to the
environment. Orthogonal flags on g remove all cross terms once g is traced.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .process import ORDER, ProcessMatrix, from_factors
from .tensor import Factorization, identity_vector, maximally_mixed, partial_trace, projector

GLOBAL_ORDER = ("g", "a1", "a2", "b1", "b2", "e1", "e2", "e3")
MAX_TOTAL_DIM = 4096
PRESETS = ("product", "mixed_b1")


def preset_psi(kind: str, d: int) -> tuple[np.ndarray, int]:
    """Seed states on x (x) y (x) e3; returns ``(vector, e3_dim)``."""
    if d < 2:
        raise ValueError("presets need d >= 2")
    zero = np.zeros(d, dtype=np.complex128)
    zero[0] = 1
    if kind == "product":
        return np.kron(zero, zero), 1
    if kind == "mixed_b1":
        return np.kron(zero, identity_vector(d) / np.sqrt(d)), d
    raise ValueError(f"unknown preset {kind!r}; choose from {PRESETS}")


@dataclass(frozen=True, eq=False)
class HarmonicModel:
    alpha: tuple[complex, complex, complex]
    d: int
    psi: np.ndarray
    e3_dim: int = 1

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        if len(alpha) != 3:
            raise ValueError("alpha needs three amplitudes")
        norm = sum(abs(a) ** 2 for a in alpha)
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"|alpha|^2 must sum to 1, got {norm!r}")
        d, k = int(self.d), int(self.e3_dim)
        if d < 1 or k < 1:
            raise ValueError("dimensions must be positive")
        psi = np.asarray(self.psi, dtype=np.complex128).reshape(-1)
        if psi.size != d * d * k:
            raise ValueError(f"psi has {psi.size} entries, expected d*d*e3 = {d * d * k}")
        if abs(np.linalg.norm(psi) - 1) > 1e-12:
            raise ValueError("psi must have unit norm")
        if d ** 4 > MAX_TOTAL_DIM:
            raise ValueError(f"d = {d} exceeds the desk-scale cap")
        psi = psi.copy()
        psi.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e3_dim", k)
        object.__setattr__(self, "psi", psi)

    @classmethod
    def from_preset(cls, alpha, d: int, kind: str = "product") -> "HarmonicModel":
        psi, k = preset_psi(kind, d)
        return cls(tuple(alpha), d, psi, k)

    @classmethod
    def from_probabilities(cls, p, d: int, kind: str = "product") -> "HarmonicModel":
        p = np.clip(np.asarray(p, dtype=float), 0, None)
        return cls.from_preset(tuple(np.sqrt(p / p.sum())), d, kind)

    @property
    def p(self) -> tuple[float, float, float]:
        return tuple(abs(a) ** 2 for a in self.alpha)

    @property
    def rho_xye3(self) -> np.ndarray:
        return projector(self.psi)

    def marginal(self, which: str) -> np.ndarray:
        """Reduced seed state on ``"x"``, ``"y"`` or ``"xy"``."""
        f = Factorization([("x", self.d), ("y", self.d), ("e3", self.e3_dim)])
        keep = {"x": ["x"], "y": ["y"], "xy": ["x", "y"]}[which]
        return partial_trace(self.rho_xye3, f, [l for l in f.labels if l not in keep])

    @property
    def rho_a1(self) -> np.ndarray:
        return self.marginal("x")

    @property
    def rho_b1(self) -> np.ndarray:
        return self.marginal("y")

    def is_maximally_mixed(self, which: str, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.marginal(which) - maximally_mixed(self.d))) <= tol)

    def to_json(self) -> dict:
        return {
            "alpha": [[a.real, a.imag] for a in self.alpha],
            "dim": self.d,
            "psi": {"vector": [[z.real, z.imag] for z in self.psi], "e3_dim": self.e3_dim},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HarmonicModel":
        alpha = tuple(complex(re, im) for re, im in obj["alpha"])
        d = int(obj["dim"])
        psi = obj["psi"]
        if "preset" in psi:
            return cls.from_preset(alpha, d, psi["preset"])
        vector = np.array([complex(re, im) for re, im in psi["vector"]])
        return cls(alpha, d, vector, int(psi["e3_dim"]))


@dataclass(frozen=True)
class GlobalState:
    """The pure global vector |w> with its system layout."""

    vector: np.ndarray
    systems: Factorization

    def density(self) -> np.ndarray:
        if self.systems.total > MAX_TOTAL_DIM:
            raise ValueError(f"global dimension {self.systems.total} exceeds the desk-scale cap")
        return projector(self.vector)


def build_global(m: HarmonicModel) -> GlobalState:
    d, k = m.d, m.e3_dim
    psi = m.psi.reshape(d, d, k)
    I = np.eye(d, dtype=np.complex128)
    # axes: g, a1, a2, b1, b2, e1, e2, e3
    shape = (3, d, d, d, d, d, d, k)
    w = np.zeros(shape, dtype=np.complex128)
    # |Psi>^{a1 e2 e3} |I>^{a2 b1} |I>^{b2 e1}
    w[0] = m.alpha[0] * np.einsum("xyk,pq,rs->xpqrsyk", psi, I, I)
    # |Psi>^{e1 b1 e3} |I>^{b2 a1} |I>^{a2 e2}
    w[1] = m.alpha[1] * np.einsum("xyk,ra,pt->apyrxtk", psi, I, I)
    # |Psi>^{a1 b1 e3} |I>^{a2 e1} |I>^{b2 e2}
    w[2] = m.alpha[2] * np.einsum("xyk,pe,rt->xpyretk", psi, I, I)
    f = Factorization(zip(GLOBAL_ORDER, shape))
    return GlobalState(w.reshape(-1), f)


def reduce(m: HarmonicModel) -> ProcessMatrix:
    """Trace the flag and environment out of |w><w|, leaving W on a1 a2 b1 b2."""
    d = m.d
    g = build_global(m)
    V = g.vector.reshape(3, d ** 4, -1).transpose(1, 0, 2).reshape(d ** 4, -1)
    return ProcessMatrix(V @ V.conj().T, (d, d, d, d))


def branch(m: HarmonicModel, i: int) -> ProcessMatrix:
    """Branch process matrix built directly from marginals of the seed state."""
    d = m.d
    ident = np.eye(d)
    phi = projector(identity_vector(d))
    if i == 1:
        factors = [("rho", m.rho_a1, [("a1", d)]), ("phi", phi, [("a2", d), ("b1", d)]),
                   ("discard", ident, [("b2", d)])]
    elif i == 2:
        factors = [("rho", m.rho_b1, [("b1", d)]), ("phi", phi, [("a1", d), ("b2", d)]),
                   ("discard", ident, [("a2", d)])]
    elif i == 3:
        factors = [("rho", m.marginal("xy"), [("a1", d), ("b1", d)]),
                   ("discard_a", ident, [("a2", d)]), ("discard_b", ident, [("b2", d)])]
    else:
        raise ValueError(f"branch index must be 1, 2 or 3, got {i}")
    return from_factors(factors)


def mixture(m: HarmonicModel) -> ProcessMatrix:
    p = m.p
    return p[0] * branch(m, 1) + p[1] * branch(m, 2) + p[2] * branch(m, 3)


__all__ = ["HarmonicModel", "GlobalState", "build_global", "reduce", "branch", "mixture",
           "preset_psi", "ORDER"]
