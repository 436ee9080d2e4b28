"""Incoherent single-subsystem channels and the entanglement-distribution scenario."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotIncoherent, NotTracePreserving
from .measures import qi_coherence
from .qstate import DensityMatrix, ProductBasis, computational_basis, dephase, entropy, partial_trace, validate
from .tolerances import TOL


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Kraus operators on one ``dim``-dimensional subsystem.

    Construction enforces completeness and, unless ``require_incoherent`` is
    False, the structural incoherence condition: every column of every operator
    (in the computational basis) has at most one nonzero entry.
    """

    operators: tuple[np.ndarray, ...]
    require_incoherent: bool = field(default=True, repr=False)

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise DimensionMismatch("DimensionMismatch: a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise DimensionMismatch(f"DimensionMismatch: Kraus shapes {[k.shape for k in ops]}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        res = self.completeness_residual()
        if res > TOL.kraus:
            raise NotTracePreserving(f"NotTracePreserving: max |sum K^dagger K - I| = {res:.3e}")
        if self.require_incoherent and self.incoherence_residual() > TOL.kraus:
            raise NotIncoherent(
                f"NotIncoherent: a Kraus column has two nonzero entries (residual {self.incoherence_residual():.3e})"
            )

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_residual(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def incoherence_residual(self) -> float:
        """Largest magnitude left in any Kraus column after removing its dominant entry."""
        worst = 0.0
        for k in self.operators:
            a = np.abs(k)
            top = a.max(axis=0)
            worst = max(worst, float((a.sum(axis=0) - top).max()))
        return worst

    def is_incoherent(self) -> bool:
        return self.incoherence_residual() <= TOL.kraus


def apply_channel(channel: KrausChannel, rho: DensityMatrix, target: int) -> DensityMatrix:
    """Apply ``channel`` to subsystem ``target``, identity elsewhere."""
    if not 0 <= target < rho.n_parties or rho.dims[target] != channel.dim:
        raise DimensionMismatch(
            f"DimensionMismatch: channel of dim {channel.dim} on subsystem {target} of {rho.dims}"
        )
    dims = rho.dims
    left = int(np.prod(dims[:target]))
    right = int(np.prod(dims[target + 1:]))
    d = channel.dim
    t = rho.matrix.reshape(left, d, right, left, d, right)
    out = np.zeros_like(t)
    for k in channel.operators:
        out += np.einsum("ab,ibjkcl,dc->iajkdl", k, t, k.conj())
    n = rho.dim
    return validate(dims, out.reshape(n, n))


def random_incoherent_channel(dim: int, seed) -> KrausChannel:
    """Random mixture of a diagonal-phase unitary, a permutation unitary and full dephasing."""
    if dim < 2:
        raise DimensionMismatch(f"DimensionMismatch: dim must be >= 2, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(3))
    phases = np.diag(np.exp(2j * np.pi * rng.random(dim)))
    perm = np.eye(dim)[:, rng.permutation(dim)]
    ops = [np.sqrt(w[0]) * phases, np.sqrt(w[1]) * perm]
    for j in range(dim):
        p = np.zeros((dim, dim))
        p[j, j] = 1.0
        ops.append(np.sqrt(w[2]) * p)
    return KrausChannel(tuple(ops))


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),))


def dephasing_channel(dim: int) -> KrausChannel:
    return KrausChannel(tuple(np.diag(np.eye(dim)[j]) for j in range(dim)))


# -- entanglement distribution --------------------------------------------------

@dataclass(frozen=True)
class DistributionScenario:
    """Tripartite state with parts (A, B, R) located at ``parts``; R may go through ``channel``."""

    initial: DensityMatrix
    channel: KrausChannel | None = None
    parts: tuple[int, int, int] = (0, 1, 2)
    basis: ProductBasis | None = None

    def __post_init__(self):
        if self.initial.n_parties != 3 or sorted(self.parts) != [0, 1, 2]:
            raise DimensionMismatch(f"DimensionMismatch: scenario needs a tripartite state, parts {self.parts}")
        if self.channel is not None and self.channel.dim != self.initial.dims[self.parts[2]]:
            raise DimensionMismatch("DimensionMismatch: channel dimension differs from part R")

    @property
    def reference(self) -> ProductBasis:
        return self.basis or computational_basis(self.initial.dims)

    def final(self) -> DensityMatrix:
        if self.channel is None:
            return self.initial
        return apply_channel(self.channel, self.initial, self.parts[2])


def _is_pure(rho: DensityMatrix) -> bool:
    return abs(rho.purity() - 1.0) < 1e-9


def distribution_terms(scenario: DistributionScenario) -> dict:
    """The coherence terms of the distribution bounds, keyed by cut label.

    Without a channel: C^{AR|B}, C^{A|BR}, C^{R|AB} of the shared state. With a
    channel the first and last use the final state and C^{A|BR} the initial one.
    """
    a, _, r = scenario.parts
    k = scenario.reference
    rho_i = scenario.initial
    rho_f = scenario.final()
    terms = {
        "C_AR|B": qi_coherence(rho_f, (a, r), k).value,
        "C_A|BR": qi_coherence(rho_i, (a,), k).value,
        "C_R|AB": qi_coherence(rho_f, (r,), k).value,
    }
    if scenario.channel is not None:
        terms["C_A|BR(final)"] = qi_coherence(rho_f, (a,), k).value
    return terms


def pure_state_corollary(rho: DensityMatrix, parts=(0, 1, 2), basis: ProductBasis | None = None) -> dict:
    """Entropies of the AR marginal of ``rho`` dephased on A and R, and of its two halves."""
    a, _, r = parts
    basis = basis or computational_basis(rho.dims)
    ar = partial_trace(rho, sorted((a, r)))
    local = ProductBasis(ar.dims, tuple(basis.locals[i] for i in sorted((a, r))))
    tilde = dephase(ar, local)
    ia, ir = (0, 1) if a < r else (1, 0)
    return {
        "S_AR": entropy(tilde),
        "S_A": entropy(partial_trace(tilde, [ia])),
        "S_R": entropy(partial_trace(tilde, [ir])),
    }


def run_distribution(scenario: DistributionScenario):
    """Check the coherence bound for distributing R, noiseless or through ``scenario.channel``."""
    from .verifier import Inequality, TheoremReport

    terms = distribution_terms(scenario)
    if scenario.channel is None:
        theorem = "5"
        checks = [Inequality("C_AR|B - C_A|BR <= C_R|AB", terms["C_AR|B"] - terms["C_A|BR"], terms["C_R|AB"])]
        if _is_pure(scenario.initial):
            cor = pure_state_corollary(scenario.initial, scenario.parts, scenario.basis)
            terms.update(cor)
            checks.append(Inequality("S(AR~) <= S(A~) + S(R~)", cor["S_AR"], cor["S_A"] + cor["S_R"]))
    else:
        theorem = "6"
        checks = [
            Inequality(
                "C_AR|B(f) - C_A|BR(i) <= C_R|AB(f)", terms["C_AR|B"] - terms["C_A|BR"], terms["C_R|AB"]
            )
        ]
    return TheoremReport.from_checks(theorem, "scenario", terms, checks)

