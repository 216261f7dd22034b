"""Dilation of a unital self-adjoint PSD Schur multiplier in one extra tensor leg.

Factor the symbol as t_ij = <v_i, v_j>, put the fermion algebra over the
quotient space next to the input algebra, and set

    d = sum_i e_ii (x) w(v_i),        pi(x) = x (x) 1,        rho = d pi(.) d.

d is a symmetry (self-adjoint, squares to the identity, commutes with the
ambient density), pi and rho are unital state-preserving morphisms commuting
with the modular flow, and the pair factorizes the multiplier through the
ambient state: phi(M_t(x) y) = phi~(pi(x) rho(y)).  Convex combinations of
certified maps dilate by direct sums with reweighted ambient states, and the
bilinear adjoint swaps the roles of pi and rho up to symbol transposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import config
from .condexp import word_closure
from .errors import PreconditionError, ShapeError
from .fock import FermionRep, build_fermion_rep
from .matcore import as_square, dagger, matrix_unit, max_abs, random_complex, rng, tensor_product
from .schur import GramSpace, SchurSymbol, apply_multiplier, build_gram_space, certify_symbol
from .states import DiagonalState, modular_conjugate

__all__ = [
    "DilationBundle",
    "build_dilation",
    "verify_factorization",
    "verify_morphism_markov",
    "MorphismReport",
    "convex_combination_dilation",
    "star_swap_check",
    "verify_even_closure",
]


@dataclass(frozen=True)
class DilationBundle:
    """Ambient algebra data dilating one (or a convex family of) multiplier(s)."""

    input_dim: int
    ambient_dim: int
    input_state: DiagonalState
    ambient_state: DiagonalState
    d: np.ndarray
    pi: Callable[[np.ndarray], np.ndarray]
    rho: Callable[[np.ndarray], np.ndarray]
    gram: GramSpace | None = None
    rep: FermionRep | None = None
    # pi/rho may be partial: when set, their domain is the span of this basis
    domain_basis: tuple[np.ndarray, ...] | None = None

    def ambient_phi(self, x: np.ndarray) -> complex:
        return complex(np.dot(self.ambient_state.weights, np.diagonal(x)))


def build_dilation(symbol: SchurSymbol, state: DiagonalState,
                   tol: float = config.TOL_NUM) -> DilationBundle:
    """Construct the fermionic dilation bundle for a certified symbol."""
    report = certify_symbol(symbol, tol=tol)
    if not (report.unital and report.psd and report.self_adjoint):
        raise PreconditionError(
            f"symbol must be unital, PSD, self-adjoint; got {report}")
    n = symbol.dim
    if state.dim != n:
        raise ShapeError("state dimension does not match symbol")

    gram = build_gram_space(symbol)
    rep = build_fermion_rep(gram)
    fock_dim = rep.dim
    eye_f = np.eye(fock_dim, dtype=complex)

    d = np.zeros((n * fock_dim, n * fock_dim), dtype=complex)
    for i in range(n):
        d[i * fock_dim : (i + 1) * fock_dim, i * fock_dim : (i + 1) * fock_dim] = \
            rep.generator_omega(i)

    def pi(x: np.ndarray) -> np.ndarray:
        return tensor_product(as_square(x, "pi argument"), eye_f)

    def rho(x: np.ndarray) -> np.ndarray:
        return d @ pi(x) @ d

    ambient_weights = np.repeat(state.weights, fock_dim) / fock_dim
    return DilationBundle(
        input_dim=n,
        ambient_dim=n * fock_dim,
        input_state=state,
        ambient_state=DiagonalState(ambient_weights),
        d=d,
        pi=pi,
        rho=rho,
        gram=gram,
        rep=rep,
    )


def _sample_pairs(n: int, samples: int, seed: int | None):
    """All matrix-unit pairs plus seeded random pairs."""
    pairs = [(matrix_unit(n, i, j), matrix_unit(n, k, l))
             for i in range(n) for j in range(n)
             for k in range(n) for l in range(n)]
    gen = rng(seed)
    pairs.extend((random_complex(gen, n), random_complex(gen, n)) for _ in range(samples))
    return pairs


def verify_factorization(bundle: DilationBundle, symbol: SchurSymbol,
                         state: DiagonalState, samples: int = 20,
                         seed: int | None = None) -> float:
    """Largest residual of phi(M_t(x) y) = phi~(pi(x) rho(y)) over sampled pairs."""
    if symbol.dim != bundle.input_dim or state.dim != bundle.input_dim:
        raise ShapeError("verify_factorization dimension mismatch")
    w = bundle.ambient_state.weights
    worst = 0.0
    for x, y in _sample_pairs(bundle.input_dim, samples, seed):
        lhs = state(apply_multiplier(symbol, x) @ y)
        px, ry = bundle.pi(x), bundle.rho(y)
        rhs = complex(np.einsum("i,ij,ji->", w, px, ry))
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class MorphismReport:
    unital: float
    multiplicative: float
    star: float
    state_preserving: float
    modular: float

    def max_residual(self) -> float:
        return max(self.unital, self.multiplicative, self.star,
                   self.state_preserving, self.modular)


def verify_morphism_markov(bundle: DilationBundle, samples: int = 10,
                           seed: int | None = None,
                           t_samples=config.T_SAMPLES) -> dict[str, MorphismReport]:
    """Check pi and rho are unital state-preserving *-morphisms intertwining
    the modular flows of the input and ambient states."""
    n = bundle.input_dim
    eye_n = np.eye(n, dtype=complex)
    gen = rng(seed)
    if bundle.domain_basis is None:
        xs = [matrix_unit(n, i, j) for i in range(n) for j in range(n)]
        xs += [random_complex(gen, n) for _ in range(samples)]
    else:
        basis = np.stack(bundle.domain_basis)
        xs = list(basis)
        coeffs = random_complex(gen, samples, basis.shape[0])
        xs += list(np.tensordot(coeffs, basis, axes=1))

    out = {}
    for name, mor in (("pi", bundle.pi), ("rho", bundle.rho)):
        images = [mor(x) for x in xs]
        unital = max_abs(mor(eye_n) - np.eye(bundle.ambient_dim))
        mult = star = preserve = modular = 0.0
        for x, mx in zip(xs, images):
            star = max(star, max_abs(mor(dagger(x)) - dagger(mx)))
            preserve = max(preserve, abs(bundle.input_state(x) - bundle.ambient_phi(mx)))
            for t in t_samples:
                lhs = modular_conjugate(bundle.ambient_state, mx, t)
                rhs = mor(modular_conjugate(bundle.input_state, x, t))
                modular = max(modular, max_abs(lhs - rhs))
        for a in range(len(xs)):
            for b in range(a, len(xs)):
                mult = max(mult, max_abs(images[a] @ images[b] - mor(xs[a] @ xs[b])))
        out[name] = MorphismReport(unital=unital, multiplicative=mult, star=star,
                                   state_preserving=preserve, modular=modular)
    return out


def convex_combination_dilation(bundles, weights) -> DilationBundle:
    """Direct-sum bundle dilating the convex combination of the dilated maps.

    All bundles must share the input algebra and input state; the ambient
    state is the weighted direct sum, so the factorization identity adds up.
    """
    bundles = list(bundles)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if len(bundles) != w.size or not bundles:
        raise ShapeError("need matching nonempty bundles and weights")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > config.TOL_NUM:
        raise PreconditionError("weights must be strictly positive and sum to 1")
    n = bundles[0].input_dim
    base_state = bundles[0].input_state
    for b in bundles:
        if b.input_dim != n:
            raise PreconditionError("bundles must share the input dimension")
        if max_abs(b.input_state.weights - base_state.weights) > config.TOL_NUM:
            raise PreconditionError("bundles must share the input state")

    dims = [b.ambient_dim for b in bundles]
    offsets = np.concatenate([[0], np.cumsum(dims)])
    total = int(offsets[-1])

    def embed_blocks(blocks):
        out = np.zeros((total, total), dtype=complex)
        for o, dim_b, blk in zip(offsets, dims, blocks):
            out[o : o + dim_b, o : o + dim_b] = blk
        return out

    def pi(x):
        return embed_blocks([b.pi(x) for b in bundles])

    def rho(x):
        return embed_blocks([b.rho(x) for b in bundles])

    d_total = embed_blocks([b.d for b in bundles])
    ambient_weights = np.concatenate(
        [wi * b.ambient_state.weights for wi, b in zip(w, bundles)])
    return DilationBundle(
        input_dim=n,
        ambient_dim=total,
        input_state=base_state,
        ambient_state=DiagonalState(ambient_weights),
        d=d_total,
        pi=pi,
        rho=rho,
    )


def star_swap_check(bundle: DilationBundle, symbol: SchurSymbol,
                    state: DiagonalState, samples: int = 20,
                    seed: int | None = None) -> float:
    """Largest residual of phi(adj(y) x) = phi~(rho(y) pi(x)), where adj is the
    bilinear adjoint of the multiplier (transposed symbol)."""
    if symbol.dim != bundle.input_dim:
        raise ShapeError("star_swap_check dimension mismatch")
    adj_symbol = SchurSymbol(symbol.matrix.T)
    w = bundle.ambient_state.weights
    worst = 0.0
    for x, y in _sample_pairs(bundle.input_dim, samples, seed):
        lhs = state(apply_multiplier(adj_symbol, y) @ x)
        ry, px = bundle.rho(y), bundle.pi(x)
        rhs = complex(np.einsum("i,ij,ji->", w, ry, px))
        worst = max(worst, abs(lhs - rhs))
    return worst


def verify_even_closure(bundle: DilationBundle, tol: float = config.TOL_NUM) -> float:
    """Largest odd-parity component in the algebra generated by pi and rho images.

    The generated algebra should sit inside matrices (x) even fermion part:
    every closure element must commute with 1 (x) parity.
    """
    if bundle.rep is None:
        raise PreconditionError("bundle does not carry a fermion representation")
    n = bundle.input_dim
    gens = [bundle.pi(matrix_unit(n, i, j)) for i in range(n) for j in range(n)]
    gens += [bundle.rho(matrix_unit(n, i, j)) for i in range(n) for j in range(n)]
    algebra = word_closure(gens)
    par = tensor_product(np.eye(n, dtype=complex), bundle.rep.parity())
    worst = 0.0
    for b in algebra.basis:
        worst = max(worst, max_abs(par @ b @ par - b))
    return worst
