"""Named example states and seeded random-state streams."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

import numpy as np

from .basis_search import haar_random_basis
from .errors import BadParameter, UnknownName
from .qstate import DensityMatrix, partial_trace, validate

_KET0 = np.array([1.0, 0.0])
_KET1 = np.array([0.0, 1.0])
_PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
_MINUS = np.array([1.0, -1.0]) / np.sqrt(2)


def _proj(v):
    return np.outer(v, np.conj(v))


def _ghz_vector(n: int) -> np.ndarray:
    psi = np.zeros(2**n)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def _w_vector(n: int) -> np.ndarray:
    psi = np.zeros(2**n)
    for k in range(n):
        psi[1 << k] = 1 / np.sqrt(n)
    return psi


def _count(params, key, lo):
    n = params.get(key, 3)
    if int(n) != n or n < lo:
        raise BadParameter(f"BadParameter: {key}={n!r}, need an integer >= {lo}")
    return int(n)


def named_state(name: str, **params) -> DensityMatrix:
    """Build one of: plus_plus, bell, datta, werner(p), ghz(n), w(n), maximally_mixed(dims)."""
    if name == "plus_plus":
        return DensityMatrix.from_pure((2, 2), np.kron(_PLUS, _PLUS))
    if name == "bell":
        return DensityMatrix.from_pure((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    if name == "datta":
        m = (
            np.kron(_proj(_PLUS), _proj(_KET0))
            + np.kron(_proj(_MINUS), _proj(_KET1))
            + np.kron(_proj(_KET0), _proj(_MINUS))
            + np.kron(_proj(_KET1), _proj(_PLUS))
        ) / 4
        return DensityMatrix((2, 2), m)
    if name == "werner":
        p = params.get("p")
        if p is None or not 0.0 <= float(p) <= 1.0:
            raise BadParameter(f"BadParameter: werner needs p in [0, 1], got {p!r}")
        p = float(p)
        bell = _proj(np.array([1, 0, 0, 1]) / np.sqrt(2))
        return DensityMatrix((2, 2), (1 - p) * np.eye(4) / 4 + p * bell)
    if name == "ghz":
        n = _count(params, "n", 2)
        return DensityMatrix.from_pure((2,) * n, _ghz_vector(n))
    if name == "w":
        n = _count(params, "n", 2)
        return DensityMatrix.from_pure((2,) * n, _w_vector(n))
    if name == "maximally_mixed":
        dims = tuple(params.get("dims", (2, 2)))
        if not dims or any(int(d) < 2 for d in dims):
            raise BadParameter(f"BadParameter: dims {dims!r}")
        d = prod(dims)
        return DensityMatrix(dims, np.eye(d) / d)
    raise UnknownName(f"UnknownName: no named state {name!r}")


KINDS = ("haar_pure", "induced_mixed", "product_pure", "classical")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dims: tuple[int, ...]
    count: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.kind not in KINDS:
            raise UnknownName(f"UnknownName: ensemble kind {self.kind!r}, expected one of {KINDS}")
        if self.count < 1 or not self.dims or any(d < 2 for d in self.dims):
            raise BadParameter(f"BadParameter: invalid ensemble {self}")


def _ginibre_vector(d: int, rng) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_state(kind: str, dims: Sequence[int], rng: np.random.Generator) -> DensityMatrix:
    dims = tuple(dims)
    d = prod(dims)
    if kind == "haar_pure":
        return validate(dims, DensityMatrix.from_pure(dims, _ginibre_vector(d, rng)).matrix)
    if kind == "induced_mixed":
        # Haar pure state on system (x) equal-size environment, environment traced out
        psi = _ginibre_vector(d * d, rng)
        joint = DensityMatrix.from_pure(dims + dims, psi)
        reduced = partial_trace(joint, range(len(dims)))
        return validate(dims, reduced.matrix)
    if kind == "product_pure":
        psi = np.ones(1, dtype=complex)
        for k in dims:
            psi = np.kron(psi, _ginibre_vector(k, rng))
        return validate(dims, np.outer(psi, psi.conj()))
    if kind == "classical":
        p = rng.dirichlet(np.ones(d))
        u = haar_random_basis(dims, rng).unitary()
        return validate(dims, (u * p) @ u.conj().T)
    raise UnknownName(f"UnknownName: ensemble kind {kind!r}")


def state_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for draw ``index`` of stream ``seed``; any draw is replayable on its own."""
    return np.random.default_rng([int(seed), int(index)])


def random_states(spec: EnsembleSpec) -> Iterator[DensityMatrix]:
    for i in range(spec.count):
        yield random_state(spec.kind, spec.dims, state_rng(spec.seed, i))
