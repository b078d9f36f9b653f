"""Core engine: symmetrized probe assembly, threshold bisection, CJ-map evaluation,
and the measure-and-prepare constructions reaching unit fidelity.

The probe for a state rho on A x B with n copies and k extensions is

    sum_i V_i ((rho^{x n})^T x M^alpha x I) V_i,

where the n copies are fused into composite A and B subsystems before the
extensions attach, V_i swaps the distinguished (B, b) pair with the i-th
extension pair, and M^alpha = alpha*I - Bell on the two output qubits.  Its
smallest eigenvalue is negative exactly when fidelity above alpha is reachable
by a k-extendible map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import blocks
from .linalg import (
    DENSE_DIM_LIMIT,
    HermitianOperator,
    LinearMapHandle,
    SolverConvergenceError,
    SystemLayout,
    eig_min_dense,
    eig_min_dense_vec,
    eig_min_iterative,
    embed,
    layout,
    partial_trace,
    permute_subsystems,
    relabel,
    reorder_to,
)
from .states import TOL_PSD, DensityOperator, bell_state, from_matrix, werner, WernerParams

log = logging.getLogger("kextdistill")

TOL_EIG = 1e-9          # threshold predicate: lambda_min < -TOL_EIG
DEFAULT_TOL_ALPHA = 1e-8
SIDES = ("bob", "alice")
BELLS = ("phi_plus", "psi_minus")
BACKENDS = ("auto", "dense", "iterative", "s3_blocks")


class SingularOutputError(RuntimeError):
    """The map annihilated the input state; fidelity is undefined."""


@dataclass(frozen=True)
class CJOperator:
    """Choi state of a map from A x B to the two output qubits a, b (unnormalized)."""

    op: HermitianOperator

    def __post_init__(self) -> None:
        labs = self.op.layout.labels
        if labs != ("A", "B", "a", "b"):
            raise ValueError(f"CJ operator must live on (A, B, a, b), got {labs}")
        lam = eig_min_dense(self.op)
        scale = max(1.0, float(np.abs(self.op.entries).max()))
        if lam < -TOL_PSD * scale:
            raise ValueError(f"CJ operator is not PSD: smallest eigenvalue {lam:.3e}")

    @property
    def layout(self) -> SystemLayout:
        return self.op.layout

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the fidelity bisection.

    alpha_star is the largest probe value certified negative, a lower bound on
    the supremum that is exact (within tolerance) for full-rank states and a
    certified lower bound otherwise.
    """

    alpha_star: float
    samples: tuple[tuple[float, float], ...]
    full_rank: bool
    backend: str
    lambda_residual: float
    certificate: np.ndarray | None = None


@dataclass(frozen=True)
class KExtProblem:
    """An instance: state, copies n, extensions k, extension side, Bell target, backend."""

    state: DensityOperator
    n: int = 1
    k: int = 1
    side: str = "bob"
    bell: str = "phi_plus"
    backend: str = "auto"
    werner_gamma: float | None = None

    def __post_init__(self) -> None:
        if len(self.state.layout.subsystems) != 2:
            raise ValueError("the input state must be bipartite")
        if self.n < 1 or self.k < 1:
            raise ValueError("need n >= 1 copies and k >= 1 extensions")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if self.bell not in BELLS:
            raise ValueError(f"bell must be one of {BELLS}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if self.backend == "dense" and self.total_dim > DENSE_DIM_LIMIT:
            raise ValueError(
                f"dense backend limited to dimension {DENSE_DIM_LIMIT}, "
                f"this problem has {self.total_dim}"
            )
        if self.backend == "s3_blocks":
            if self.k != 1:
                raise ValueError("the block backend covers k = 1 only")
            if self.werner_gamma is None:
                raise ValueError("the block backend needs werner_gamma")
            self._check_is_werner()

    def _check_is_werner(self) -> None:
        d_a, d_b = self.input_dims
        if d_a != d_b:
            raise ValueError("a Werner state lives on d x d")
        ref = werner(WernerParams(d=d_a, gamma=self.werner_gamma))
        if np.abs(ref.matrix - self.state.matrix).max() > 1e-10:
            raise ValueError("state does not match the declared Werner parameters")

    @classmethod
    def for_werner(
        cls,
        d: int,
        gamma: float | None = None,
        p: float | None = None,
        n: int = 1,
        k: int = 1,
        side: str = "bob",
        bell: str = "phi_plus",
        backend: str = "auto",
    ) -> "KExtProblem":
        params = WernerParams(d=d, gamma=gamma, p=p)
        return cls(
            state=werner(params),
            n=n,
            k=k,
            side=side,
            bell=bell,
            backend=backend,
            werner_gamma=params.gamma_value,
        )

    @property
    def input_dims(self) -> tuple[int, int]:
        (_, d_a), (_, d_b) = self.state.layout.subsystems
        return d_a, d_b

    @property
    def total_dim(self) -> int:
        d_a, d_b = self.input_dims
        if self.side == "bob":
            return d_a**self.n * d_b ** (self.n * (self.k + 1)) * 2 ** (self.k + 2)
        return d_a ** (self.n * (self.k + 1)) * d_b**self.n * 2 ** (self.k + 2)

    def resolved_backend(self) -> str:
        if self.backend != "auto":
            return self.backend
        return "dense" if self.total_dim < DENSE_DIM_LIMIT else "iterative"


def _fuse_copies(mat: np.ndarray, d_a: int, d_b: int, n: int) -> np.ndarray:
    """(A1 B1 A2 B2 ...) ordered n-fold product, regrouped as (A1..An, B1..Bn)."""
    if n == 1:
        return mat
    acc = mat
    for _ in range(n - 1):
        acc = np.kron(acc, mat)
    dims = (d_a, d_b) * n
    order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    order = order + [p + 2 * n for p in order]
    big = d_a**n * d_b**n
    return acc.reshape(dims * 2).transpose(order).reshape(big, big)


class ProbeAssembly:
    """Precomputed pieces of the probe: probe(alpha) = const_part + alpha * linear_part."""

    def __init__(self, problem: KExtProblem):
        self.problem = problem
        d_a, d_b = problem.input_dims
        n, k = problem.n, problem.k
        rho_t = problem.state.matrix.T
        self.rho_fused = _fuse_copies(rho_t, d_a, d_b, n)
        self.bell = bell_state(problem.bell, 2).matrix
        big_a, big_b = d_a**n, d_b**n
        if problem.side == "bob":
            subs = [("A", big_a)] + [(f"B{i}", big_b) for i in range(k + 1)]
            subs += [("a", 2)] + [(f"b{i}", 2) for i in range(k + 1)]
            self.pairs = [(("A", f"B{i}"), ("a", f"b{i}")) for i in range(k + 1)]
        else:
            subs = [(f"A{i}", big_a) for i in range(k + 1)] + [("B", big_b)]
            subs += [(f"a{i}", 2) for i in range(k + 1)] + [("b", 2)]
            self.pairs = [((f"A{i}", "B"), (f"a{i}", "b")) for i in range(k + 1)]
        self.layout = SystemLayout(tuple(subs))
        self.is_real = not np.iscomplexobj(self.rho_fused)
        self._dense_pieces: tuple[np.ndarray, np.ndarray] | None = None

    def dense_pieces(self) -> tuple[np.ndarray, np.ndarray]:
        if self._dense_pieces is None:
            dim = self.layout.total_dim
            dtype = np.float64 if self.is_real else np.complex128
            const = np.zeros((dim, dim), dtype=dtype)
            linear = np.zeros((dim, dim), dtype=dtype)
            for big, small in self.pairs:
                linear += embed(self.layout, {big: self.rho_fused}).entries
                const -= embed(self.layout, {big: self.rho_fused, small: self.bell}).entries
            self._dense_pieces = (const, linear)
        return self._dense_pieces

    def dense(self, alpha: float) -> HermitianOperator:
        const, linear = self.dense_pieces()
        return HermitianOperator(self.layout, const + alpha * linear)

    def handle(self, alpha: float) -> LinearMapHandle:
        dims = self.layout.dims
        rho_r = self.rho_fused.reshape(
            self.layout.dim_of(self.pairs[0][0][0]),
            self.layout.dim_of(self.pairs[0][0][1]),
            self.layout.dim_of(self.pairs[0][0][0]),
            self.layout.dim_of(self.pairs[0][0][1]),
        )
        bell_r = self.bell.reshape(2, 2, 2, 2)
        axis_pairs = [
            (
                (self.layout.index(big[0]), self.layout.index(big[1])),
                (self.layout.index(small[0]), self.layout.index(small[1])),
            )
            for big, small in self.pairs
        ]

        def apply_pair(op4: np.ndarray, tensor: np.ndarray, p: int, q: int) -> np.ndarray:
            out = np.tensordot(op4, tensor, axes=([2, 3], [p, q]))
            return np.moveaxis(out, (0, 1), (p, q))

        def apply(vec: np.ndarray) -> np.ndarray:
            vt = vec.reshape(dims)
            acc = np.zeros_like(vt)
            for (pa, pb), (qa, qb) in axis_pairs:
                rv = apply_pair(rho_r, vt, pa, pb)
                acc = acc + alpha * rv - apply_pair(bell_r, rv, qa, qb)
            return acc.reshape(-1)

        return LinearMapHandle(
            dim=self.layout.total_dim, apply=apply, is_real=self.is_real, layout=self.layout
        )


def build_probe(problem: KExtProblem, alpha: float) -> HermitianOperator | LinearMapHandle:
    """Assemble the symmetrized probe at a given alpha (dense matrix or matrix-free handle)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    backend = problem.resolved_backend()
    if backend == "s3_blocks":
        raise ValueError("the block backend has no explicit probe; use lambda_min_alpha")
    assembly = ProbeAssembly(problem)
    if backend == "dense":
        return assembly.dense(alpha)
    return assembly.handle(alpha)


def _lambda_min_from_assembly(
    assembly: ProbeAssembly, alpha: float, backend: str, return_vector: bool = False
):
    if backend == "dense":
        probe = assembly.dense(alpha)
        if return_vector:
            return eig_min_dense_vec(probe)
        return eig_min_dense(probe)
    try:
        return eig_min_iterative(assembly.handle(alpha), return_vector=return_vector)
    except SolverConvergenceError:
        if assembly.layout.total_dim <= 2 * DENSE_DIM_LIMIT:
            log.warning(
                "iterative eigensolver did not converge at alpha=%.6g on dim %d; "
                "falling back to a dense solve",
                alpha,
                assembly.layout.total_dim,
            )
            probe = assembly.dense(alpha)
            if return_vector:
                return eig_min_dense_vec(probe)
            return eig_min_dense(probe)
        raise


def lambda_min_alpha(problem: KExtProblem, alpha: float) -> float:
    """Smallest probe eigenvalue at alpha via the problem's backend."""
    backend = problem.resolved_backend()
    if backend == "s3_blocks":
        return blocks.s3_block_lambda_min(problem.werner_gamma, alpha, problem.n)
    return _lambda_min_from_assembly(ProbeAssembly(problem), alpha, backend)


def fidelity_threshold(
    problem: KExtProblem,
    tol_alpha: float = DEFAULT_TOL_ALPHA,
    tol_eig: float = TOL_EIG,
) -> ThresholdResult:
    """Bisect sup{alpha : lambda_min(alpha) < -tol_eig} over [0, 1].

    Valid because the alpha-derivative of the probe is a symmetrized PSD
    operator, so lambda_min is nondecreasing in alpha.
    """
    if tol_alpha < 1e-10:
        raise ValueError("tol_alpha below 1e-10 is tighter than the eigensolver tolerances")
    backend = problem.resolved_backend()
    if backend == "s3_blocks":
        def lam(alpha: float) -> float:
            return blocks.s3_block_lambda_min(problem.werner_gamma, alpha, problem.n)
        assembly = None
    else:
        assembly = ProbeAssembly(problem)

        def lam(alpha: float) -> float:
            return _lambda_min_from_assembly(assembly, alpha, backend)

    samples: list[tuple[float, float]] = []

    def negative(alpha: float) -> bool:
        value = lam(alpha)
        samples.append((alpha, value))
        return value < -tol_eig

    full_rank = problem.state.is_full_rank()
    lo, hi = 0.0, 1.0
    if not negative(lo):
        return ThresholdResult(
            alpha_star=0.0,
            samples=tuple(sorted(samples)),
            full_rank=full_rank,
            backend=backend,
            lambda_residual=samples[0][1],
        )
    while hi - lo > tol_alpha:
        mid = 0.5 * (lo + hi)
        if negative(mid):
            lo = mid
        else:
            hi = mid
    certificate = None
    if assembly is not None:
        _, certificate = _lambda_min_from_assembly(assembly, lo, backend, return_vector=True)
    residual = min(value for alpha, value in samples if alpha == lo)
    return ThresholdResult(
        alpha_star=lo,
        samples=tuple(sorted(samples)),
        full_rank=full_rank,
        backend=backend,
        lambda_residual=residual,
        certificate=certificate,
    )


# ---------------------------------------------------------------------------
# symmetrization and CJ machinery


def symmetrize(h: HermitianOperator, groups: Sequence[Sequence[str]]) -> HermitianOperator:
    """sum_i V_i h V_i where V_i swaps the first label group with the i-th (V_0 = I)."""
    if len(groups) < 1:
        raise ValueError("need at least the distinguished group")
    head = tuple(groups[0])
    acc = h.entries.copy()
    for other in groups[1:]:
        other = tuple(other)
        if len(other) != len(head):
            raise ValueError("groups must have equal length")
        perm = {}
        for x, y in zip(head, other):
            perm[x] = y
            perm[y] = x
        acc = acc + permute_subsystems(h, perm).entries
    return HermitianOperator(h.layout, acc)


def evaluate_map_fidelity(cj: CJOperator, state: DensityOperator) -> float:
    """Overlap of the (renormalized) map output with the Bell target.

    The map acts through its Choi state: Lambda(rho) is d^2 times the partial
    trace over the inputs of cj * (rho^T x I).  Raises SingularOutputError
    when the output trace vanishes (never happens for full-rank states).
    """
    d_a = cj.layout.dim_of("A")
    d_b = cj.layout.dim_of("B")
    (_, sa), (_, sb) = state.layout.subsystems
    if (sa, sb) != (d_a, d_b):
        raise ValueError(f"state dims {(sa, sb)} do not match CJ input dims {(d_a, d_b)}")
    d_in = d_a * d_b
    cj_grouped = cj.matrix.reshape(d_in, 4, d_in, 4)
    rho_t = state.matrix.T
    out = d_in * np.einsum("ixjy,ji->xy", cj_grouped, rho_t)
    tr_out = float(np.trace(out).real)
    scale = max(1.0, float(np.abs(out).max()))
    if tr_out <= 1e-12 * scale:
        raise SingularOutputError("the map output has vanishing trace on this state")
    target = bell_state("phi_plus", 2).matrix
    fid = float(np.trace(out @ target).real) / tr_out
    return min(max(fid, 0.0), 1.0)


def cj_of_mnp(
    sigma_in: DensityOperator,
    sigma_out: DensityOperator,
    side: str = "bob",
) -> CJOperator:
    """Choi state of the measure-and-prepare map defined by two extended states.

    Both states live on (spectator, slot_0, ..., slot_k); measuring the
    reduction of sigma_in on slot i prepares the matching reduction of
    sigma_out.  The construction symmetrizes slot 0 against the others and
    traces them out, so the result is k-extendible by construction.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    subs_in = sigma_in.layout.subsystems
    subs_out = sigma_out.layout.subsystems
    if len(subs_in) != len(subs_out) or len(subs_in) < 3:
        raise ValueError("need matching layouts (spectator, slot_0, ..., slot_k) with k >= 1")
    k = len(subs_in) - 2
    slot_dims = {dim for _, dim in subs_in[1:]}
    if len(slot_dims) != 1 or {dim for _, dim in subs_out[1:]} != {subs_out[1][1]}:
        raise ValueError("all slots of each state must share one dimension")

    in_labels = ["S"] + [f"X{i}" for i in range(k + 1)]
    out_labels = ["s"] + [f"x{i}" for i in range(k + 1)]
    lay = SystemLayout(
        tuple((lab, dim) for lab, (_, dim) in zip(in_labels, subs_in))
        + tuple((lab, dim) for lab, (_, dim) in zip(out_labels, subs_out))
    )
    big = embed(lay, {tuple(in_labels): sigma_in.matrix.T, tuple(out_labels): sigma_out.matrix})
    sym = symmetrize(big, [("X0", "x0")] + [(f"X{i}", f"x{i}") for i in range(1, k + 1)])
    core = partial_trace(sym, ("S", "X0", "s", "x0"))
    if side == "bob":
        named = relabel(core, {"S": "A", "X0": "B", "s": "a", "x0": "b"})
    else:
        named = relabel(core, {"S": "B", "X0": "A", "s": "b", "x0": "a"})
    d_a, d_b = named.layout.dim_of("A"), named.layout.dim_of("B")
    target = layout(("A", d_a), ("B", d_b), ("a", 2), ("b", 2))
    return CJOperator(reorder_to(named, target))


# ---------------------------------------------------------------------------
# unit-fidelity constructions for rank-deficient states


def _find_product_kernel_vector(state: DensityOperator, tol: float = 1e-11):
    """Search for |phi>|psi> annihilated by the state; None if the search fails."""
    (_, d_a), (_, d_b) = state.layout.subsystems
    rho = state.matrix
    tensor = rho.reshape(d_a, d_b, d_a, d_b)
    diag = np.real(np.diagonal(rho))
    order = np.argsort(diag)
    for flat in order[: d_a * d_b]:
        if diag[flat] > tol:
            break
        i, j = divmod(int(flat), d_b)
        phi = np.zeros(d_a, dtype=complex)
        psi = np.zeros(d_b, dtype=complex)
        phi[i] = 1.0
        psi[j] = 1.0
        return phi, psi

    def b_matrix(phi: np.ndarray) -> np.ndarray:
        return np.einsum("a,abcd,c->bd", phi.conj(), tensor, phi)

    def a_matrix(psi: np.ndarray) -> np.ndarray:
        return np.einsum("b,abcd,d->ac", psi.conj(), tensor, psi)

    rng = np.random.default_rng(11)
    starts = [rng.standard_normal(d_a) + 1j * rng.standard_normal(d_a) for _ in range(6)]
    for phi in starts:
        phi = phi / np.linalg.norm(phi)
        value = np.inf
        psi = None
        for _ in range(80):
            _, vecs = np.linalg.eigh(b_matrix(phi))
            psi = vecs[:, 0]
            _, vecs = np.linalg.eigh(a_matrix(psi))
            phi = vecs[:, 0]
            new_value = float(
                np.real(np.einsum("a,b,abcd,c,d", phi.conj(), psi.conj(), tensor, phi, psi))
            )
            if abs(new_value - value) < 1e-16:
                value = new_value
                break
            value = new_value
        if value < tol and psi is not None:
            return phi, psi
    return None


def _projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def _mnp_output(k: int) -> DensityOperator:
    """Joint output state: Bell pair on (spectator, slot 0), maximally mixed elsewhere."""
    lay = SystemLayout((("s", 2),) + tuple((f"x{i}", 2) for i in range(k + 1)))
    pieces = {("s", "x0"): bell_state("phi_plus", 2).matrix}
    for i in range(1, k + 1):
        pieces[f"x{i}"] = np.eye(2) / 2.0
    return from_matrix(embed(lay, pieces).entries, lay)


def construct_f1_strategy(
    state: DensityOperator,
    k: int,
    kernel_extension: DensityOperator | None = None,
):
    """Measure-and-prepare strategy with unit fidelity on a rank-deficient state.

    Covers three routes: a product vector in the kernel (either extension
    side, any k), any kernel vector (k = 1), or a caller-supplied symmetric
    extension of a kernel state on (A, E_1, ..., E_k).  Returns (cj, side),
    or None when the state is full rank or no qualifying structure is found.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if state.is_full_rank():
        return None
    (_, d_a), (_, d_b) = state.layout.subsystems
    rho = state.matrix

    if kernel_extension is not None:
        return _strategy_from_extension(state, k, kernel_extension)

    found = _find_product_kernel_vector(state)
    if found is not None:
        phi, psi = found
        # tr(rho (P_phi x I)): zero iff phi x anything sits in the kernel
        overlap = float(
            np.real(np.einsum("a,abcb,c->", phi.conj(), rho.reshape(d_a, d_b, d_a, d_b), phi))
        )
        if overlap > TOL_PSD:
            # measure the product kernel state on the extension slots
            lay = SystemLayout((("S", d_a), ("X0", d_b)) + tuple((f"X{i}", d_b) for i in range(1, k + 1)))
            pieces = {"S": _projector(phi), "X0": np.eye(d_b) / d_b}
            for i in range(1, k + 1):
                pieces[f"X{i}"] = _projector(psi)
            sigma_in = from_matrix(embed(lay, pieces).entries, lay)
            return cj_of_mnp(sigma_in, _mnp_output(k), side="bob"), "bob"
        # phi x anything is annihilated: extend on the other side
        rho_a = partial_trace(state.op, (state.layout.labels[0],)).entries
        lay = SystemLayout((("S", d_b), ("X0", d_a)) + tuple((f"X{i}", d_a) for i in range(1, k + 1)))
        pieces = {"S": np.eye(d_b) / d_b, "X0": rho_a / np.trace(rho_a).real}
        for i in range(1, k + 1):
            pieces[f"X{i}"] = _projector(phi)
        sigma_in = from_matrix(embed(lay, pieces).entries, lay)
        return cj_of_mnp(sigma_in, _mnp_output(k), side="alice"), "alice"

    if k == 1:
        _, vecs = np.linalg.eigh(rho)
        kernel_vec = vecs[:, 0]
        ext_layout = layout(("A", d_a), ("E1", d_b))
        extension = from_matrix(_projector(kernel_vec), ext_layout)
        return _strategy_from_extension(state, 1, extension)
    return None


def _strategy_from_extension(state: DensityOperator, k: int, extension: DensityOperator):
    """Build the Bob-side strategy from a symmetric extension of a kernel state."""
    (_, d_a), (_, d_b) = state.layout.subsystems
    subs = extension.layout.subsystems
    if len(subs) != k + 1:
        raise ValueError(f"kernel extension must live on (A, E_1, ..., E_{k})")
    if subs[0][1] != d_a or any(dim != d_b for _, dim in subs[1:]):
        raise ValueError("kernel extension dims do not match the state")
    labels = extension.layout.labels
    marg0 = partial_trace(extension.op, (labels[0], labels[1])).entries
    for lab in labels[2:]:
        marg = reorder_to(
            partial_trace(extension.op, (labels[0], lab)),
            layout((labels[0], d_a), (lab, d_b)),
        ).entries
        if np.abs(marg - marg0).max() > 1e-9:
            raise ValueError("kernel extension marginals are not symmetric")
    overlap_kernel = float(np.trace(state.matrix @ marg0).real)
    if overlap_kernel > 1e-9:
        raise ValueError(
            f"extension marginal is not in the kernel: overlap {overlap_kernel:.3e}"
        )
    sigma_a = partial_trace(extension.op, (labels[0],)).entries
    weight = float(np.real(np.trace(state.matrix @ np.kron(sigma_a, np.eye(d_b))))) / d_b
    if weight <= TOL_PSD:
        # every product of supp(sigma_a) with anything is annihilated; the
        # product-vector routes cover that case
        return construct_f1_strategy(state, k)
    lay = SystemLayout(
        (("S", d_a), ("X0", d_b)) + tuple((f"X{i}", d_b) for i in range(1, k + 1))
    )
    pieces = {
        tuple(["S"] + [f"X{i}" for i in range(1, k + 1)]): extension.matrix,
        "X0": np.eye(d_b) / d_b,
    }
    sigma_in = from_matrix(embed(lay, pieces).entries, lay)
    return cj_of_mnp(sigma_in, _mnp_output(k), side="bob"), "bob"


def maximally_mixed_probe_triple(alpha: float) -> tuple[float, float, float]:
    """Eigenvalues {2a, (4a-3)/2, (4a-1)/2} of M_ab x I + M_ae x I on three qubits."""
    return 2.0 * alpha, (4.0 * alpha - 3.0) / 2.0, (4.0 * alpha - 1.0) / 2.0
