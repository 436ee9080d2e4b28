"""Dense density-matrix kernel: construction, reduction, spectra, entropies, dephasing.

All entropies are in bits. Subsystem order is always the order of ``dims``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadPartition,
    BadTrace,
    DimensionMismatch,
    EmptyKeepSet,
    EmptySubset,
    IndexOutOfRange,
    NoConvergence,
    NotHermitian,
    NotPositive,
)
from .tolerances import TOL


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix over subsystems of dimensions ``dims``.

    The constructor only checks shapes; use :func:`validate` for untrusted input.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise DimensionMismatch(f"DimensionMismatch: subsystem dims must be >= 2, got {dims}")
        m = _frozen(self.matrix)
        n = prod(dims)
        if m.shape != (n, n):
            raise DimensionMismatch(
                f"DimensionMismatch: matrix shape {m.shape} does not match dims {dims}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return eigh(self.matrix).eigenvalues

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    @classmethod
    def from_pure(cls, dims: Sequence[int], psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims), np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """One orthonormal basis per subsystem; ``locals[i]`` holds basis vectors as columns."""

    dims: tuple[int, ...]
    locals: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "locals", tuple(_frozen(u) for u in self.locals))
        if len(self.locals) != len(self.dims) or any(
            u.shape != (d, d) for u, d in zip(self.locals, self.dims)
        ):
            raise DimensionMismatch(
                f"DimensionMismatch: basis blocks {[u.shape for u in self.locals]} vs dims {self.dims}"
            )

    @classmethod
    def trusted(cls, dims: tuple[int, ...], locals: tuple[np.ndarray, ...]) -> "ProductBasis":
        """Skip copying and shape checks; for optimizer inner loops only."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "dims", dims)
        object.__setattr__(obj, "locals", locals)
        return obj

    def unitary(self, subset: Iterable[int] | None = None) -> np.ndarray:
        """Kronecker product of the local unitaries on ``subset`` (all subsystems by default)."""
        idx = range(len(self.dims)) if subset is None else subset
        out = np.ones((1, 1), dtype=complex)
        for i in idx:
            out = np.kron(out, self.locals[i])
        return out

    def unitarity_error(self) -> float:
        return max(
            float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) for u in self.locals
        )

    def replace(self, index: int, local: np.ndarray) -> "ProductBasis":
        locs = list(self.locals)
        locs[index] = local
        return ProductBasis(self.dims, tuple(locs))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns


def computational_basis(dims: Sequence[int]) -> ProductBasis:
    return ProductBasis(tuple(dims), tuple(np.eye(d, dtype=complex) for d in dims))


def check_basis(basis: ProductBasis, dims: Sequence[int]) -> None:
    if tuple(basis.dims) != tuple(dims):
        raise DimensionMismatch(f"DimensionMismatch: basis dims {basis.dims} vs state dims {tuple(dims)}")


def validate(dims: Sequence[int], raw_matrix) -> DensityMatrix:
    """Check and normalize an untrusted matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero and the trace renormalized.
    """
    dims = tuple(int(d) for d in dims)
    m = np.asarray(raw_matrix, dtype=complex)
    n = prod(dims) if dims else 0
    if not dims or any(d < 2 for d in dims) or m.shape != (n, n):
        raise DimensionMismatch(f"DimensionMismatch: matrix shape {m.shape} vs dims {dims}")
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > TOL.hermitian:
        raise NotHermitian(f"NotHermitian: max |A - A^dagger| = {herm:.3e}")
    tr = np.trace(m)
    if abs(tr - 1.0) > TOL.trace:
        raise BadTrace(f"BadTrace: trace = {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w[0] < -TOL.negative_clip:
        raise NotPositive(f"NotPositive: minimum eigenvalue {w[0]:.6g}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        m = (v * w) @ v.conj().T
        m = m / np.trace(m).real
    return DensityMatrix(dims, m)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def tensor_all(states: Sequence[DensityMatrix]) -> DensityMatrix:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _check_indices(indices, n: int, empty_error) -> tuple[int, ...]:
    idx = sorted({int(i) for i in indices})
    if not idx:
        raise empty_error(f"{empty_error.__name__}: no subsystems selected")
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexOutOfRange(f"IndexOutOfRange: {idx} for {n} subsystems")
    return tuple(idx)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on ``keep``; kept subsystems stay in their original order."""
    n = rho.n_parties
    keep = _check_indices(keep, n, EmptyKeepSet)
    if len(keep) == n:
        return rho
    gone = tuple(i for i in range(n) if i not in keep)
    dk = prod(rho.dims[i] for i in keep)
    dg = prod(rho.dims[i] for i in gone)
    t = rho.matrix.reshape(rho.dims + rho.dims)
    perm = keep + gone + tuple(n + i for i in keep) + tuple(n + i for i in gone)
    t = t.transpose(perm).reshape(dk, dg, dk, dg)
    red = np.trace(t, axis1=1, axis2=3)
    return DensityMatrix(tuple(rho.dims[i] for i in keep), red)


def eigh(a) -> Spectrum:
    """Full Hermitian eigendecomposition, eigenvalues descending.

    Backed by LAPACK; a LAPACK convergence failure surfaces as :class:`NoConvergence`.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"DimensionMismatch: eigh needs a square matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if float(np.max(np.abs(a - a.conj().T), initial=0.0)) > TOL.hermitian * scale:
        raise NotHermitian("NotHermitian: eigh input is not Hermitian")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"NoConvergence: {exc}") from exc
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def shannon(p, axis: int = -1) -> np.ndarray | float:
    """Shannon entropy in bits of (possibly unnormalized) weights; entries <= 1e-12 contribute 0."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > TOL.log_zero, p, 1.0)
    return -np.sum(np.where(p > TOL.log_zero, p * np.log2(safe), 0.0), axis=axis)


def shannon_fast(p: np.ndarray) -> float:
    """:func:`shannon` for a flat float array."""
    p = p[p > TOL.log_zero]
    return -float(np.dot(p, np.log2(p)))


def entropy(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else rho
    return float(shannon(np.linalg.eigvalsh(m)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in bits, ``inf`` when supp(rho) is not inside supp(sigma)."""
    if rho.dims != sigma.dims:
        raise DimensionMismatch(f"DimensionMismatch: {rho.dims} vs {sigma.dims}")
    lr, vr = np.linalg.eigh(rho.matrix)
    ls, vs = np.linalg.eigh(sigma.matrix)
    # overlaps[i, j] = |<r_i|s_j>|^2
    overlaps = np.abs(vr.conj().T @ vs) ** 2
    live = lr > TOL.support_eigenvalue
    null = ls <= TOL.log_zero
    if np.any(overlaps[np.ix_(live, null)] > TOL.support_overlap):
        return float("inf")
    log_s = np.log2(np.where(null, 1.0, ls))
    cross = float(np.sum(lr[:, None] * overlaps[:, ~null] * log_s[None, ~null]))
    return max(-float(shannon(lr)) - cross, 0.0)


def _parse_cut(cut, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    try:
        a, b = cut
        a = tuple(sorted(int(i) for i in a))
        b = tuple(sorted(int(i) for i in b))
    except (TypeError, ValueError) as exc:
        raise BadPartition(f"BadPartition: cannot read cut {cut!r}") from exc
    if not a or not b or set(a) & set(b) or set(a) | set(b) != set(range(n)):
        raise BadPartition(f"BadPartition: {cut!r} does not split {n} subsystems into two groups")
    return a, b


def mutual_information(rho: DensityMatrix, cut=None) -> float:
    """S(A) + S(B) - S(AB) across ``cut = (group_a, group_b)``; defaults to 0 | rest."""
    n = rho.n_parties
    if cut is None:
        cut = ((0,), tuple(range(1, n)))
    a, b = _parse_cut(cut, n)
    return entropy(partial_trace(rho, a)) + entropy(partial_trace(rho, b)) - entropy(rho)


def total_correlation(rho: DensityMatrix) -> float:
    return sum(entropy(partial_trace(rho, [i])) for i in range(rho.n_parties)) - entropy(rho)


# -- dephasing ---------------------------------------------------------------

def grouped(matrix: np.ndarray, dims: Sequence[int], subset: Sequence[int]) -> np.ndarray:
    """View ``matrix`` as a (dM, dR, dM, dR) array with the ``subset`` subsystems first."""
    n = len(dims)
    rest = tuple(i for i in range(n) if i not in subset)
    dm = prod(dims[i] for i in subset)
    dr = prod(dims[i] for i in rest)
    perm = tuple(subset) + rest + tuple(n + i for i in subset) + tuple(n + i for i in rest)
    return matrix.reshape(tuple(dims) * 2).transpose(perm).reshape(dm, dr, dm, dr)


def ungrouped(t: np.ndarray, dims: Sequence[int], subset: Sequence[int]) -> np.ndarray:
    n = len(dims)
    rest = tuple(i for i in range(n) if i not in subset)
    order = tuple(subset) + rest
    shape = tuple(dims[i] for i in order) * 2
    perm = order + tuple(n + i for i in order)
    inv = np.argsort(perm)
    d = prod(dims)
    return t.reshape(shape).transpose(inv).reshape(d, d)


def measured_blocks(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Unnormalized post-measurement blocks ``<k|rho|k>`` for the columns ``|k>`` of ``u``.

    ``t`` is a grouped (dM, dR, dM, dR) array; the result has shape (dM, dR, dR).
    """
    return np.einsum("mk,mrns,nk->krs", u.conj(), t, u)


def dephase(rho: DensityMatrix, basis: ProductBasis, subset: Iterable[int] | None = None) -> DensityMatrix:
    """Pinch ``rho`` with the rank-one projectors of ``basis`` on ``subset`` (all by default)."""
    check_basis(basis, rho.dims)
    n = rho.n_parties
    subset = tuple(range(n)) if subset is None else _check_indices(subset, n, EmptySubset)
    u = basis.unitary(subset)
    t = grouped(rho.matrix, rho.dims, subset)
    blocks = measured_blocks(t, u)
    # back to the original frame: sum_k |k><k| (x) block_k
    out = np.einsum("mk,krs,nk->mrns", u, blocks, u.conj())
    return DensityMatrix(rho.dims, ungrouped(out, rho.dims, subset))


def check_subset(subset: Iterable[int], n: int, proper: bool = False, error=None) -> tuple[int, ...]:
    from .errors import BadSubset

    err = error or (BadSubset if proper else EmptySubset)
    try:
        idx = _check_indices(subset, n, err)
    except IndexOutOfRange as exc:
        raise err(str(exc)) from exc
    if proper and len(idx) == n:
        raise err(f"{err.__name__}: measured set {idx} must leave at least one subsystem unmeasured")
    return idx
