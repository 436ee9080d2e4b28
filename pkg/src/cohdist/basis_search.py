"""Global minimization of basis-dependent objectives over local orthonormal bases.

Each local basis is ``U0 @ G(angles)`` where ``U0`` is a start basis and ``G`` an
ordered product of two-level (Givens) rotations with relative phases. A start is
refined by cyclic coordinate search with a golden-section line minimizer per
angle, followed by one extrapolation step along the sweep displacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import cmath
import math

import numpy as np

from .errors import BadAngleCount
from .qstate import DensityMatrix, ProductBasis, check_subset, computational_basis, partial_trace

Objective = Callable[[ProductBasis], float]

_GOLD = 0.3819660112501051  # 2 - golden ratio
_GROW = 1.618033988749895
_FLAT = 1e-14


def n_angles(d: int) -> int:
    return d * (d - 1)


def givens_unitary(d: int, angles) -> np.ndarray:
    """Ordered product of two-level rotations over pairs (0,1), (0,2), ..., (d-2,d-1).

    ``angles`` interleaves (theta, phi) per pair.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (n_angles(d),):
        raise BadAngleCount(f"BadAngleCount: dimension {d} needs {n_angles(d)} angles, got {angles.size}")
    if d == 2:
        c, s = math.cos(angles[0]), math.sin(angles[0])
        e = cmath.exp(1j * angles[1])
        return np.array([[c, -s / e], [s * e, c]])
    u = np.eye(d, dtype=complex)
    k = 0
    for i in range(d - 1):
        for j in range(i + 1, d):
            c, s = np.cos(angles[k]), np.sin(angles[k])
            e = np.exp(1j * angles[k + 1])
            # right-multiply by the rotation acting on columns i, j
            ci, cj = u[:, i].copy(), u[:, j].copy()
            u[:, i] = c * ci + s * e * cj
            u[:, j] = -s / e * ci + c * cj
            k += 2
    return u


@dataclass(frozen=True)
class BasisParameterization:
    dims: tuple[int, ...]
    angles: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        angles = tuple(np.asarray(a, dtype=float).ravel() for a in self.angles)
        if len(angles) != len(self.dims):
            raise BadAngleCount(f"BadAngleCount: {len(angles)} angle blocks for {len(self.dims)} subsystems")
        for d, a in zip(self.dims, angles):
            if a.size != n_angles(d):
                raise BadAngleCount(f"BadAngleCount: dimension {d} needs {n_angles(d)} angles, got {a.size}")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "BasisParameterization":
        return cls(tuple(dims), tuple(np.zeros(n_angles(d)) for d in dims))


def compose_basis(params: BasisParameterization) -> ProductBasis:
    return ProductBasis(params.dims, tuple(givens_unitary(d, a) for d, a in zip(params.dims, params.angles)))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph[None, :]


def haar_random_basis(dims: Sequence[int], seed) -> ProductBasis:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return ProductBasis(tuple(dims), tuple(haar_unitary(d, rng) for d in dims))


@dataclass(frozen=True)
class SearchConfig:
    random_starts: int = 32
    max_iterations: int = 2000  # line minimizations per start
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.random_starts < 0 or self.max_iterations < 1 or not self.tol > 0:
            raise ValueError(f"invalid SearchConfig {self}")

    def scaled(self, factor: int) -> "SearchConfig":
        """Config for a retry: ``factor`` times the random starts on a fresh stream."""
        return replace(self, random_starts=self.random_starts * factor, seed=self.seed + 7919 * factor)


@dataclass(frozen=True)
class BasisSearchResult:
    best_basis: ProductBasis
    best_value: float
    starts_used: int
    start_values: tuple[float, ...]
    converged: bool
    iterations: int
    start_labels: tuple[str, ...] = ()
    traces: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def diagnostics(self) -> dict:
        return {
            "starts_used": self.starts_used,
            "best_value": self.best_value,
            "converged": self.converged,
            "iterations": self.iterations,
            "best_start": self.start_labels[int(np.argmin(self.start_values))] if self.start_labels else None,
        }


def _golden_line(f, f0: float, h: float, xtol: float):
    """Minimize ``f(t)`` near t=0 given ``f(0) = f0``. Returns (t, f(t), evaluations)."""
    evals = 1
    fp = f(h)
    if fp < f0:
        a, b, fb = 0.0, h, fp
    else:
        fm = f(-h)
        evals += 1
        if fm < f0:
            a, b, fb = 0.0, -h, fm
        elif fm - f0 <= _FLAT and fp - f0 <= _FLAT:
            # degenerate direction, e.g. a phase angle at a pole of the rotation
            return 0.0, f0, evals
        else:
            a, b, c = -h, 0.0, h
            fb = f0
            return _golden_shrink(f, a, b, c, fb, xtol, evals)
    # expand downhill until the objective turns up; angles are periodic, so cap the span
    c = b + _GROW * (b - a)
    fc = f(c)
    evals += 1
    while fc < fb and abs(c) < 2 * np.pi:
        a, b, fb = b, c, fc
        c = b + _GROW * (b - a)
        fc = f(c)
        evals += 1
    if fc < fb:
        return c, fc, evals
    if a > c:
        a, c = c, a
    return _golden_shrink(f, a, b, c, fb, xtol, evals)


def _golden_shrink(f, a, b, c, fb, xtol, evals):
    while c - a > xtol:
        if c - b > b - a:
            x = b + _GOLD * (c - b)
            fx = f(x)
            evals += 1
            if fx < fb:
                a, b, fb = b, x, fx
            else:
                c = x
        else:
            x = b - _GOLD * (b - a)
            fx = f(x)
            evals += 1
            if fx < fb:
                c, b, fb = b, x, fx
            else:
                a = x
    return b, fb, evals


def _local_search(fx, x0: np.ndarray, config: SearchConfig, budget: int):
    """Cyclic coordinate search from ``x0``; returns (x, f, trace, iterations, converged)."""
    x = x0.copy()
    fcur = fx(x)
    trace = [fcur]
    m = x.size
    steps = np.full(m, 0.3)
    xtol = max(np.sqrt(config.tol), 1e-7)
    it = 0
    while it < budget:
        f_start, x_start = fcur, x.copy()
        for i in range(m):
            if it >= budget:
                break
            e = np.zeros(m)
            e[i] = 1.0
            t, ft, _ = _golden_line(lambda s: fx(x + s * e), fcur, steps[i], xtol)
            it += 1
            if ft < fcur:
                x = x + t * e
                fcur = ft
            steps[i] = min(max(2 * abs(t), steps[i] / 4, 10 * xtol), 1.0)
        d = x - x_start
        norm = np.linalg.norm(d)
        if norm > 10 * xtol and it < budget:
            d = d / norm
            t, ft, _ = _golden_line(lambda s: fx(x + s * d), fcur, norm, xtol)
            it += 1
            if ft < fcur:
                x = x + t * d
                fcur = ft
        trace.append(fcur)
        if f_start - fcur < config.tol:
            return x, fcur, trace, it, True
    return x, fcur, trace, it, False


def _eigenbasis_start(state: DensityMatrix, subset: Sequence[int], base: ProductBasis) -> ProductBasis:
    locs = list(base.locals)
    for i in subset:
        _, v = np.linalg.eigh(partial_trace(state, [i]).matrix)
        locs[i] = v[:, ::-1]
    return ProductBasis(base.dims, tuple(locs))


def minimize_over_bases(
    objective: Objective,
    dims: Sequence[int],
    subset: Iterable[int] | None = None,
    config: SearchConfig | None = None,
    warm_starts: Sequence[ProductBasis] = (),
    state: DensityMatrix | None = None,
    reference: ProductBasis | None = None,
) -> BasisSearchResult:
    """Multistart minimization of ``objective`` over product bases on ``subset``.

    Subsystems outside ``subset`` stay at ``reference`` (computational by default).
    Starts, in order: the reference basis, the eigenbasis of each reduced state of
    ``state`` on ``subset`` (when given), ``warm_starts``, then
    ``config.random_starts`` Haar-random bases. The first start attaining the
    minimum wins ties.
    """
    config = config or SearchConfig()
    dims = tuple(dims)
    n = len(dims)
    subset = tuple(range(n)) if subset is None else check_subset(subset, n)
    reference = reference or computational_basis(dims)

    starts: list[tuple[str, ProductBasis]] = [("reference", reference)]
    if state is not None:
        starts.append(("eigenbasis", _eigenbasis_start(state, subset, reference)))
    for k, w in enumerate(warm_starts):
        starts.append((f"warm{k}", w))
    for k in range(config.random_starts):
        starts.append((f"haar{k}", haar_random_basis(dims, np.random.default_rng([config.seed, k]))))

    sizes = [n_angles(dims[i]) for i in subset]
    offsets = np.cumsum([0] + sizes)

    values, labels, traces = [], [], []
    best = None
    total_it = 0
    all_converged = True
    for label, start in starts:
        base = [reference.locals[i] for i in range(n)]
        for i in subset:
            base[i] = start.locals[i]

        def basis_at(x, base=base):
            locs = list(base)
            for j, i in enumerate(subset):
                locs[i] = base[i] @ givens_unitary(dims[i], x[offsets[j]:offsets[j + 1]])
            return ProductBasis.trusted(dims, tuple(locs))

        def fx(x):
            return float(objective(basis_at(x)))

        x, fval, trace, it, conv = _local_search(fx, np.zeros(offsets[-1]), config, config.max_iterations)
        total_it += it
        all_converged &= conv
        values.append(fval)
        labels.append(label)
        traces.append(tuple(trace))
        if best is None or fval < best[0]:
            best = (fval, ProductBasis(dims, basis_at(x).locals))

    return BasisSearchResult(
        best_basis=best[1],
        best_value=best[0],
        starts_used=len(starts),
        start_values=tuple(values),
        converged=all_converged,
        iterations=total_it,
        start_labels=tuple(labels),
        traces=tuple(traces),
    )
