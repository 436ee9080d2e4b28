"""Coherence, discord and dissonance measures.

Every value is in bits. Quantities that involve a minimization over bases carry
the minimizing basis as ``witness`` so that derived terms (dissonance, entropic
cost) are evaluated at the same nearest classical state.

Zurek and symmetric discord use the standard convention: the mutual information
that survives the best local measurement is subtracted, i.e. the post-measurement
mutual information is maximized.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .basis_search import BasisSearchResult, SearchConfig, minimize_over_bases
from .qstate import (
    DensityMatrix,
    ProductBasis,
    _parse_cut,
    check_basis,
    check_subset,
    computational_basis,
    dephase,
    entropy,
    grouped,
    measured_blocks,
    partial_trace,
    shannon_fast,
)


@dataclass(frozen=True)
class MeasureValue:
    value: float
    witness: ProductBasis | None = None
    search: BasisSearchResult | None = None

    def __float__(self) -> float:
        return float(self.value)


def _kron(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        a, b = out.shape[0], m.shape[0]
        out = (out[:, None, :, None] * m[None, :, None, :]).reshape(a * b, a * b)
    return out


def _block_spectrum(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Eigenvalues of the state dephased on the grouped leading factor, one row per outcome."""
    if t.shape[1] == 1:
        m = t[:, 0, :, 0]
        return np.einsum("mk,mk->k", u.conj(), m @ u).real[:, None]
    return np.linalg.eigvalsh(measured_blocks(t, u))


def dephased_entropy_objective(rho: DensityMatrix, subset: Sequence[int]):
    """Objective ``basis -> S(rho dephased on subset in basis)``."""
    subset = tuple(subset)
    t = grouped(rho.matrix, rho.dims, subset)

    def objective(basis: ProductBasis) -> float:
        u = _kron([basis.locals[i] for i in subset])
        return shannon_fast(_block_spectrum(t, u).ravel())

    return objective


def conditional_entropy_objective(rho: DensityMatrix, measured: Sequence[int]):
    """Objective ``basis -> sum_k p_k S(rho_rest|k)`` after measuring ``measured``.

    Minimizing it maximizes the post-measurement mutual information between the
    measured subsystems and the rest.
    """
    measured = tuple(measured)
    t = grouped(rho.matrix, rho.dims, measured)

    def objective(basis: ProductBasis) -> float:
        u = _kron([basis.locals[i] for i in measured])
        spec = _block_spectrum(t, u)
        return shannon_fast(spec.ravel()) - shannon_fast(spec.sum(axis=1))

    return objective


def _groups(n: int, cut) -> tuple[tuple[int, ...], ...]:
    if cut is None:
        return tuple((i,) for i in range(n))
    return _parse_cut(cut, n)


def dephased_correlation_objective(rho: DensityMatrix, groups):
    """Objective ``basis -> -T_groups(fully dephased rho)`` (negated total correlation)."""
    dims = rho.dims
    n = len(dims)
    t = rho.matrix.reshape(prod(dims), 1, prod(dims), 1)
    axes = [tuple(j for j in range(n) if j not in g) for g in groups]

    def objective(basis: ProductBasis) -> float:
        u = _kron(basis.locals)
        p = _block_spectrum(t, u)[:, 0]
        pt = p.reshape(dims)
        marg = sum(shannon_fast(pt.sum(axis=ax).ravel()) for ax in axes)
        return shannon_fast(p) - marg

    return objective


def _correlation(rho: DensityMatrix, groups) -> float:
    return sum(entropy(partial_trace(rho, g)) for g in groups) - entropy(rho)


# -- fixed-basis quantities ---------------------------------------------------

def coherence(rho: DensityMatrix, basis: ProductBasis | None = None) -> MeasureValue:
    """Relative entropy of coherence S(dephased rho) - S(rho)."""
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    return MeasureValue(entropy(dephase(rho, basis)) - entropy(rho), witness=basis)


def local_coherences(rho: DensityMatrix, basis: ProductBasis | None = None) -> list[float]:
    """Coherence of every single-subsystem marginal in its local reference basis."""
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    out = []
    for i, d in enumerate(rho.dims):
        local = ProductBasis((d,), (basis.locals[i],))
        out.append(coherence(partial_trace(rho, [i]), local).value)
    return out


def qi_coherence(rho: DensityMatrix, measured: Sequence[int], basis: ProductBasis | None = None) -> MeasureValue:
    """Quantum-incoherent relative entropy: entropy gain from dephasing only ``measured``."""
    measured = check_subset(measured, rho.n_parties, proper=True)
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    return MeasureValue(entropy(dephase(rho, basis, measured)) - entropy(rho), witness=basis)


# -- optimized quantities -----------------------------------------------------

def discord(
    rho: DensityMatrix,
    config: SearchConfig | None = None,
    warm_starts: Sequence[ProductBasis] = (),
) -> MeasureValue:
    """Relative entropy of discord: the smallest entropy gain of full dephasing over product bases."""
    n = rho.n_parties
    res = minimize_over_bases(
        dephased_entropy_objective(rho, range(n)),
        rho.dims,
        range(n),
        config,
        warm_starts=warm_starts,
        state=rho,
    )
    chi = dephase(rho, res.best_basis)
    return MeasureValue(entropy(chi) - entropy(rho), witness=res.best_basis, search=res)


def nearest_classical(rho: DensityMatrix, q: MeasureValue) -> DensityMatrix:
    return dephase(rho, q.witness)


def dissonance(
    rho: DensityMatrix,
    basis: ProductBasis | None = None,
    config: SearchConfig | None = None,
    q: MeasureValue | None = None,
) -> MeasureValue:
    """Coherence, in ``basis``, left in the nearest classical state found by :func:`discord`."""
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    q = q or discord(rho, config, warm_starts=(basis,))
    chi = nearest_classical(rho, q)
    return MeasureValue(entropy(dephase(chi, basis)) - entropy(chi), witness=q.witness, search=q.search)


def entropic_cost(
    rho: DensityMatrix,
    basis: ProductBasis | None = None,
    config: SearchConfig | None = None,
    q: MeasureValue | None = None,
) -> MeasureValue:
    """S(dephased nearest classical state) - S(dephased rho), both dephased in ``basis``."""
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    q = q or discord(rho, config, warm_starts=(basis,))
    chi = nearest_classical(rho, q)
    return MeasureValue(
        entropy(dephase(chi, basis)) - entropy(dephase(rho, basis)), witness=q.witness, search=q.search
    )


def one_way_discord(
    rho: DensityMatrix,
    measured: Sequence[int],
    config: SearchConfig | None = None,
    warm_starts: Sequence[ProductBasis] = (),
) -> MeasureValue:
    measured = check_subset(measured, rho.n_parties, proper=True)
    res = minimize_over_bases(
        dephased_entropy_objective(rho, measured),
        rho.dims,
        measured,
        config,
        warm_starts=warm_starts,
        state=rho,
    )
    omega = dephase(rho, res.best_basis, measured)
    return MeasureValue(entropy(omega) - entropy(rho), witness=res.best_basis, search=res)


def one_way_dissonance(
    rho: DensityMatrix,
    measured: Sequence[int],
    basis: ProductBasis | None = None,
    config: SearchConfig | None = None,
    q: MeasureValue | None = None,
) -> MeasureValue:
    measured = check_subset(measured, rho.n_parties, proper=True)
    basis = basis or computational_basis(rho.dims)
    check_basis(basis, rho.dims)
    q = q or one_way_discord(rho, measured, config, warm_starts=(basis,))
    omega = dephase(rho, q.witness, measured)
    return MeasureValue(
        entropy(dephase(omega, basis, measured)) - entropy(omega), witness=q.witness, search=q.search
    )


def zurek_discord(
    rho: DensityMatrix,
    measured: Sequence[int] = (0,),
    config: SearchConfig | None = None,
    warm_starts: Sequence[ProductBasis] = (),
) -> MeasureValue:
    """Mutual information lost under the least disturbing rank-one measurement on ``measured``."""
    measured = check_subset(measured, rho.n_parties, proper=True)
    rest = tuple(i for i in range(rho.n_parties) if i not in measured)
    res = minimize_over_bases(
        conditional_entropy_objective(rho, measured),
        rho.dims,
        measured,
        config,
        warm_starts=warm_starts,
        state=rho,
    )
    mi = _correlation(rho, (measured, rest))
    post = dephase(rho, res.best_basis, measured)
    return MeasureValue(mi - _correlation(post, (measured, rest)), witness=res.best_basis, search=res)


def symmetric_discord(
    rho: DensityMatrix,
    config: SearchConfig | None = None,
    cut=None,
    warm_starts: Sequence[ProductBasis] = (),
) -> MeasureValue:
    """Correlation lost under the least disturbing product-basis measurement of every subsystem.

    Correlation is the mutual information across ``cut`` when given, otherwise the
    total correlation over single subsystems (the mutual information for two parties).
    """
    n = rho.n_parties
    groups = _groups(n, cut)
    res = minimize_over_bases(
        dephased_correlation_objective(rho, groups),
        rho.dims,
        range(n),
        config,
        warm_starts=warm_starts,
        state=rho,
    )
    post = dephase(rho, res.best_basis)
    return MeasureValue(_correlation(rho, groups) - _correlation(post, groups), witness=res.best_basis, search=res)


def chain_discord_sum(rho: DensityMatrix, config: SearchConfig | None = None) -> list[MeasureValue]:
    """Zurek discord of subsystem i against i+1..N on the reduced state of i..N, for i < N."""
    n = rho.n_parties
    out = []
    for i in range(n - 1):
        sub = partial_trace(rho, range(i, n))
        out.append(zurek_discord(sub, (0,), config))
    return out
