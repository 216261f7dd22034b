"""Entrywise (Schur) multipliers and their Gram factorizations.

A symbol is an n x n matrix t; the multiplier acts entrywise, x -> t * x.
Complete positivity of the multiplier is equivalent to positive
semidefiniteness of the symbol, and a unit diagonal makes it unital.  A real
symmetric PSD symbol factors as a Gram matrix t_ij = <v_i, v_j>; the rows v_i
live in the quotient space spanned by the eigenvectors with nonnegligible
eigenvalue, and feed the fermionic dilation downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import NotPsdError, ShapeError
from .matcore import as_square, eig_hermitian, is_hermitian, max_abs
from .states import MarkovMap

__all__ = [
    "SchurSymbol",
    "SymbolReport",
    "GramSpace",
    "apply_multiplier",
    "multiplier_map",
    "certify_symbol",
    "build_gram_space",
    "compose_symbols",
]


@dataclass(frozen=True)
class SchurSymbol:
    """Wrapper around the symbol matrix of an entrywise multiplier."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square(self.matrix, "symbol"))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SymbolReport:
    unital: bool
    psd: bool
    self_adjoint: bool
    min_eigenvalue: float | None


@dataclass(frozen=True)
class GramSpace:
    """Row vectors v_i with <v_i, v_j> reproducing a PSD symbol.

    embedding has shape (n, rank); row i represents the i-th generator in the
    quotient Hilbert space (directions with negligible eigenvalue dropped).
    """

    rank: int
    embedding: np.ndarray

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=float)
        if emb.ndim != 2 or emb.shape[1] != self.rank:
            raise ShapeError(f"embedding shape {emb.shape} does not match rank {self.rank}")
        object.__setattr__(self, "embedding", emb)

    @property
    def n(self) -> int:
        return self.embedding.shape[0]

    def gram(self) -> np.ndarray:
        return self.embedding @ self.embedding.T

    @staticmethod
    def standard(dim: int) -> "GramSpace":
        """Orthonormal generators: the identity Gram on R^dim."""
        return GramSpace(dim, np.eye(dim))


def apply_multiplier(symbol: SchurSymbol, x) -> np.ndarray:
    arr = as_square(x, "multiplier argument")
    if arr.shape != symbol.matrix.shape:
        raise ShapeError("apply_multiplier dimension mismatch")
    return symbol.matrix * arr


def multiplier_map(symbol: SchurSymbol) -> MarkovMap:
    """The multiplier as a superoperator (diagonal in the matrix-unit basis)."""
    n = symbol.dim
    return MarkovMap(n, n, np.diag(symbol.matrix.reshape(-1)))


def certify_symbol(symbol: SchurSymbol, tol: float = config.TOL_NUM,
                   tol_psd: float = config.TOL_PSD) -> SymbolReport:
    """Unitality, positivity, and self-adjointness of the symbol.

    psd requires the symbol to be Hermitian; for a Hermitian symbol the verdict
    is min eig >= -tol_psd, which matches the Choi test of the induced map.
    self_adjoint means real symmetric: the multiplier equals its GNS adjoint
    for every faithful diagonal state exactly in that case.
    """
    t = symbol.matrix
    unital = max_abs(np.diagonal(t) - 1.0) <= tol
    if is_hermitian(t, tol):
        w = np.linalg.eigvalsh((t + t.conj().T) / 2)
        min_eig: float | None = float(w[0])
        psd = bool(w[0] >= -tol_psd)
    else:
        min_eig = None
        psd = False
    self_adjoint = max_abs(t - t.T) <= tol and max_abs(t.imag) <= tol
    return SymbolReport(unital=unital, psd=psd, self_adjoint=self_adjoint,
                        min_eigenvalue=min_eig)


def build_gram_space(symbol: SchurSymbol, tol_rank: float = config.TOL_RANK,
                     tol_psd: float = config.TOL_PSD) -> GramSpace:
    """Factor a real symmetric PSD symbol as a Gram matrix of row vectors.

    Eigendirections with eigenvalue below tol_rank times the largest are
    dropped, so rank-deficient symbols embed into their honest quotient.
    """
    t = symbol.matrix
    if max_abs(t - t.T) > config.TOL_NUM or max_abs(t.imag) > config.TOL_NUM:
        raise ShapeError("build_gram_space needs a real symmetric symbol")
    w, v = eig_hermitian(t.real.astype(complex))
    if w[0] < -tol_psd:
        raise NotPsdError(f"symbol has eigenvalue {w[0]:.3e}, not PSD")
    w = np.clip(w, 0.0, None)
    keep = w > tol_rank * max(w[-1], 0.0)
    if not np.any(keep):
        raise NotPsdError("symbol is numerically zero; no Gram space")
    cols = np.flatnonzero(keep)[::-1]  # largest eigenvalue first
    embedding = (v[:, cols].real * np.sqrt(w[cols]))
    return GramSpace(rank=len(cols), embedding=embedding)


def compose_symbols(a: SchurSymbol, b: SchurSymbol) -> SchurSymbol:
    """Symbol of the composed multipliers: the entrywise (Hadamard) product."""
    if a.matrix.shape != b.matrix.shape:
        raise ShapeError("compose_symbols dimension mismatch")
    return SchurSymbol(a.matrix * b.matrix)
