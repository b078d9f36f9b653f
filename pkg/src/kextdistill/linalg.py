"""Dense and matrix-free Hermitian operator engine.

Index convention: composite indices are row-major, with the first listed
subsystem most significant (numpy C-order reshape).  All permutation and
partial-trace machinery relies on this and is bit-exact reproducible.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

TOL_HERM = 1e-12      # max entrywise |H - H^dag| accepted as Hermitian
REAL_IMAG_TOL = 1e-14  # max imaginary part for the real fast path
DENSE_EIG_TOL = 1e-10
ITER_EIG_TOL = 1e-8
DENSE_DIM_LIMIT = 4096  # dense eigensolves below this dimension, iterative at/above
EIG_SEED = 20260810     # start vector for iterative solves; fixed for reproducible curves


class SolverConvergenceError(RuntimeError):
    """Iterative eigensolver failed to converge within the iteration budget."""


@dataclass(frozen=True)
class SystemLayout:
    """Ordered subsystem labels and dimensions; the index-arithmetic backbone."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        subs = tuple((str(lab), int(dim)) for lab, dim in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        labels = [lab for lab, _ in subs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels: {labels}")
        if any(dim < 1 for _, dim in subs):
            raise ValueError("subsystem dimensions must be positive integers")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.subsystems else 1

    def index(self, label: str) -> int:
        for pos, (lab, _) in enumerate(self.subsystems):
            if lab == label:
                return pos
        raise KeyError(f"unknown subsystem label {label!r}")

    def dim_of(self, label: str) -> int:
        return self.subsystems[self.index(label)][1]

    def keep(self, labels: Iterable[str]) -> "SystemLayout":
        """Sub-layout of the given labels, in original order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise KeyError(f"unknown subsystem labels {sorted(unknown)}")
        return SystemLayout(tuple(s for s in self.subsystems if s[0] in wanted))

    def concat(self, other: "SystemLayout") -> "SystemLayout":
        return SystemLayout(self.subsystems + other.subsystems)


def layout(*pairs: tuple[str, int]) -> SystemLayout:
    """Shorthand: layout(("A", 2), ("B", 2))."""
    return SystemLayout(tuple(pairs))


def _as_real_if_possible(mat: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(mat):
        if np.abs(mat.imag).max(initial=0.0) <= REAL_IMAG_TOL:
            return np.ascontiguousarray(mat.real)
        return np.ascontiguousarray(mat.astype(np.complex128, copy=False))
    return np.ascontiguousarray(mat.astype(np.float64, copy=False))


@dataclass(frozen=True)
class HermitianOperator:
    """A Hermitian matrix with an attached subsystem layout.

    Entries are stored as float64 whenever the imaginary part is negligible
    (the real fast path: every Werner-state experiment is real in the
    computational basis), complex128 otherwise.
    """

    layout: SystemLayout
    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries)
        d = self.layout.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match layout dimension {d}")
        if np.abs(mat - mat.conj().T).max(initial=0.0) > TOL_HERM:
            raise ValueError("matrix is not Hermitian within tol_herm=1e-12")
        object.__setattr__(self, "entries", _as_real_if_possible(mat))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


@dataclass(frozen=True)
class LinearMapHandle:
    """Matrix-free self-adjoint operator: apply() returns H @ v without materializing H."""

    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    is_real: bool = True
    layout: SystemLayout | None = None

    def as_linear_operator(self) -> spla.LinearOperator:
        dtype = np.float64 if self.is_real else np.complex128
        return spla.LinearOperator((self.dim, self.dim), matvec=self.apply, dtype=dtype)


# ---------------------------------------------------------------------------
# tensor-structure primitives


def kron(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Kronecker product; the layout is the concatenation of the two layouts."""
    return HermitianOperator(a.layout.concat(b.layout), np.kron(a.entries, b.entries))


def identity_op(lay: SystemLayout) -> HermitianOperator:
    return HermitianOperator(lay, np.eye(lay.total_dim))


def relabel(h: HermitianOperator, mapping: Mapping[str, str]) -> HermitianOperator:
    """Rename subsystem labels without touching the entries."""
    subs = tuple((mapping.get(lab, lab), dim) for lab, dim in h.layout.subsystems)
    return HermitianOperator(SystemLayout(subs), h.entries)


def permutation_matrix(lay: SystemLayout, perm: Mapping[str, str]) -> np.ndarray:
    """Matrix of the permutation moving the content of subsystem l to perm[l].

    Not Hermitian in general (cycles of length > 2 are not); returned as a
    plain array.
    """
    full = {lab: perm.get(lab, lab) for lab in lay.labels}
    if set(full.values()) != set(lay.labels):
        raise ValueError("perm must be a permutation of the layout labels")
    for src, dst in full.items():
        if lay.dim_of(src) != lay.dim_of(dst):
            raise ValueError(f"dimension mismatch: {src} ({lay.dim_of(src)}) -> {dst} ({lay.dim_of(dst)})")
    dims = lay.dims
    d = lay.total_dim
    digits = np.unravel_index(np.arange(d), dims)
    target = [None] * len(dims)
    for src, dst in full.items():
        target[lay.index(dst)] = digits[lay.index(src)]
    dest = np.ravel_multi_index(tuple(target), dims)
    mat = np.zeros((d, d))
    mat[dest, np.arange(d)] = 1.0
    return mat


def swap_op(lay: SystemLayout, i: str, j: str) -> HermitianOperator:
    """Permutation operator exchanging subsystems i and j (an involution, V^2 = I)."""
    if lay.dim_of(i) != lay.dim_of(j):
        raise ValueError(f"cannot swap {i!r} (dim {lay.dim_of(i)}) with {j!r} (dim {lay.dim_of(j)})")
    return HermitianOperator(lay, permutation_matrix(lay, {i: j, j: i}))


def permute_subsystems(h: HermitianOperator, perm: Mapping[str, str]) -> HermitianOperator:
    """Conjugate h by the permutation moving the content of subsystem l to perm[l]."""
    lay = h.layout
    full = {lab: perm.get(lab, lab) for lab in lay.labels}
    if set(full.values()) != set(lay.labels):
        raise ValueError("perm must be a permutation of the layout labels")
    for src, dst in full.items():
        if lay.dim_of(src) != lay.dim_of(dst):
            raise ValueError(f"dimension mismatch: {src} -> {dst}")
    n = len(lay.dims)
    # out[J] = H[sigma(J)] with sigma(J)_l = J_{pos(perm[l])}
    axes = [0] * n
    for src, dst in full.items():
        axes[lay.index(src)] = lay.index(dst)
    order = axes + [a + n for a in axes]
    out = h.entries.reshape(lay.dims * 2).transpose(order).reshape(h.dim, h.dim)
    return HermitianOperator(lay, out)


def reorder_to(h: HermitianOperator, target: SystemLayout) -> HermitianOperator:
    """Re-express h on a layout listing the same subsystems in a different order."""
    if set(target.labels) != set(h.layout.labels):
        raise ValueError("target layout must carry the same labels")
    n = len(target.dims)
    axes = [h.layout.index(lab) for lab in target.labels]
    order = axes + [a + n for a in axes]
    out = h.entries.reshape(h.layout.dims * 2).transpose(order).reshape(h.dim, h.dim)
    return HermitianOperator(target, out)


def partial_trace(h: HermitianOperator, keep: Iterable[str]) -> HermitianOperator:
    """Trace out every subsystem not in `keep`; preserves the total trace."""
    lay = h.layout
    sub = lay.keep(keep)
    kept = set(sub.labels)
    n = len(lay.dims)
    if 2 * n > len(string.ascii_letters):
        raise ValueError("too many subsystems for einsum contraction")
    letters = string.ascii_letters
    idx_in = [letters[p] for p in range(2 * n)]
    for p, lab in enumerate(lay.labels):
        if lab not in kept:
            idx_in[n + p] = idx_in[p]
    idx_out = [idx_in[p] for p, lab in enumerate(lay.labels) if lab in kept]
    idx_out += [idx_in[n + p] for p, lab in enumerate(lay.labels) if lab in kept]
    spec = "".join(idx_in) + "->" + "".join(idx_out)
    d = sub.total_dim
    out = np.einsum(spec, h.entries.reshape(lay.dims * 2)).reshape(d, d)
    return HermitianOperator(sub, out)


def partial_transpose(h: HermitianOperator, labels: Iterable[str]) -> HermitianOperator:
    """Transpose the given subsystems in the computational basis."""
    lay = h.layout
    targets = {lab for lab in labels}
    unknown = targets - set(lay.labels)
    if unknown:
        raise KeyError(f"unknown subsystem labels {sorted(unknown)}")
    n = len(lay.dims)
    order = list(range(2 * n))
    for p, lab in enumerate(lay.labels):
        if lab in targets:
            order[p], order[n + p] = order[n + p], order[p]
    out = h.entries.reshape(lay.dims * 2).transpose(order).reshape(h.dim, h.dim)
    return HermitianOperator(lay, out)


def embed(lay: SystemLayout, ops: Mapping[tuple[str, ...] | str, np.ndarray]) -> HermitianOperator:
    """Place operators on selected (possibly joint) subsystems, identity elsewhere.

    Keys are labels or label tuples; a tuple key carries one matrix acting
    jointly on those subsystems, indexed in the order given by the key.
    """
    placed: list[tuple[tuple[str, ...], np.ndarray]] = []
    used: set[str] = set()
    for key, mat in ops.items():
        labs = (key,) if isinstance(key, str) else tuple(key)
        mat = np.asarray(mat)
        d = int(np.prod([lay.dim_of(l) for l in labs]))
        if mat.shape != (d, d):
            raise ValueError(f"operator for {labs} has shape {mat.shape}, expected {(d, d)}")
        if used & set(labs):
            raise ValueError(f"subsystems {sorted(used & set(labs))} placed twice")
        used |= set(labs)
        placed.append((labs, mat))
    built_labels: list[str] = []
    pieces: list[np.ndarray] = []
    for labs, mat in placed:
        built_labels.extend(labs)
        pieces.append(mat)
    for lab in lay.labels:
        if lab not in used:
            built_labels.append(lab)
            pieces.append(np.eye(lay.dim_of(lab)))
    acc = pieces[0]
    for piece in pieces[1:]:
        acc = np.kron(acc, piece)
    built = HermitianOperator(SystemLayout(tuple((lab, lay.dim_of(lab)) for lab in built_labels)), acc)
    return reorder_to(built, lay)


# ---------------------------------------------------------------------------
# extremal eigenvalues


def _matrix_of(h: HermitianOperator | np.ndarray) -> np.ndarray:
    if isinstance(h, HermitianOperator):
        return h.entries
    mat = np.asarray(h)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    if np.abs(mat - mat.conj().T).max(initial=0.0) > TOL_HERM:
        raise ValueError("matrix is not Hermitian within tol_herm=1e-12")
    return mat


def eig_min_dense(h: HermitianOperator | np.ndarray) -> float:
    """Smallest eigenvalue by a dense solve (accurate to ~1e-10 of the spectral norm)."""
    mat = _matrix_of(h)
    if mat.shape[0] == 1:
        return float(mat[0, 0].real)
    vals = scipy.linalg.eigh(mat, eigvals_only=True, subset_by_index=(0, 0))
    return float(vals[0])


def eig_min_dense_vec(h: HermitianOperator | np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a corresponding eigenvector."""
    mat = _matrix_of(h)
    vals, vecs = scipy.linalg.eigh(mat, subset_by_index=(0, 0))
    return float(vals[0]), vecs[:, 0]


def start_vector(dim: int, is_real: bool, seed: int = EIG_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if is_real:
        v = rng.standard_normal(dim)
    else:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def eig_min_iterative(
    handle: LinearMapHandle,
    tol: float = ITER_EIG_TOL,
    max_iter: int | None = None,
    seed: int = EIG_SEED,
    return_vector: bool = False,
):
    """Smallest eigenvalue of a self-adjoint matrix-free operator (ARPACK Lanczos).

    Deterministic for a fixed seed.  Raises SolverConvergenceError instead of
    silently returning a stale iterate.
    """
    n = handle.dim
    if n < 4:
        mat = np.column_stack([handle.apply(col) for col in np.eye(n)])
        if return_vector:
            return eig_min_dense_vec(mat)
        return eig_min_dense(mat)
    op = handle.as_linear_operator()
    v0 = start_vector(n, handle.is_real, seed)
    last_exc: Exception | None = None
    for ncv in (None, min(n - 1, 48)):
        try:
            vals, vecs = spla.eigsh(op, k=1, which="SA", tol=tol, maxiter=max_iter, v0=v0, ncv=ncv)
            if return_vector:
                return float(vals[0]), vecs[:, 0]
            return float(vals[0])
        except spla.ArpackNoConvergence as exc:
            last_exc = exc
    raise SolverConvergenceError(
        f"ARPACK did not converge on dimension {n} (tol={tol}, maxiter={max_iter})"
    ) from last_exc
