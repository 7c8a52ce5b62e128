"""Sparse trilinear forms over Z_p and their rank-one decompositions."""
import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

import numpy as np

from tkrank.algebra.field import FieldContext, FieldElement
from tkrank.errors import GuardExceeded, InputError, ParameterError
from tkrank.formats import DecompositionFile, SparseTensorFile, TermFile

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENTRIES = 10**7

Index = Tuple[int, int, int]
Dims = Tuple[int, int, int]


class SparseTensor:
    """Coefficient map over index triples; zero coefficients are never stored."""

    __slots__ = ("dims", "ctx", "_entries")

    def __init__(self, dims: Sequence[int], entries: Mapping[Index, int], ctx: FieldContext):
        dims = tuple(int(d) for d in dims)
        if len(dims) != 3 or any(d < 0 for d in dims):
            raise ParameterError(f"dims must be three non-negative sizes, got {dims}")
        clean: Dict[Index, int] = {}
        for (i, j, k), coeff in entries.items():
            if not (0 <= i < dims[0] and 0 <= j < dims[1] and 0 <= k < dims[2]):
                raise ParameterError(f"index {(i, j, k)} outside dims {dims}")
            coeff = int(coeff) % ctx.p
            if coeff:
                clean[(int(i), int(j), int(k))] = coeff
        self.dims: Dims = dims
        self.ctx = ctx
        self._entries = MappingProxyType(clean)

    @property
    def entries(self) -> Mapping[Index, int]:
        return self._entries

    def support(self) -> frozenset:
        return frozenset(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseTensor)
            and self.dims == other.dims
            and self.ctx == other.ctx
            and dict(self._entries) == dict(other._entries)
        )

    def __repr__(self) -> str:
        return f"SparseTensor(dims={self.dims}, nnz={len(self)}, p={self.ctx.p})"

    def coordinate_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Index columns I, J, K and coefficients C, in one consistent order."""
        if not self._entries:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty, self.ctx.array([])
        keys = np.array(list(self._entries.keys()), dtype=np.int64)
        coeffs = self.ctx.array(list(self._entries.values()))
        return keys[:, 0], keys[:, 1], keys[:, 2], coeffs

    def to_dense(self, max_entries: int = DEFAULT_MAX_ENTRIES) -> np.ndarray:
        size = self.dims[0] * self.dims[1] * self.dims[2]
        _guard(size, max_entries, "dense tensor")
        dense = self.ctx.zeros(self.dims)
        for index, coeff in self._entries.items():
            dense[index] = coeff
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray, ctx: FieldContext) -> "SparseTensor":
        entries = {tuple(int(i) for i in idx): int(dense[tuple(idx)]) for idx in np.argwhere(dense != 0)}
        return cls(dense.shape, entries, ctx)


def unit_tensor(ctx: FieldContext) -> SparseTensor:
    return SparseTensor((1, 1, 1), {(0, 0, 0): 1}, ctx)


@dataclass(frozen=True)
class RankOneTerm:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    scale: FieldElement


class Decomposition:
    """A rank upper-bound certificate: sum_t scale_t * (u_t ⊗ v_t ⊗ w_t).

    Factors are stored as three (R, n_leg) matrices plus a scale vector.
    """

    __slots__ = ("dims", "ctx", "U", "V", "W", "scales")

    def __init__(self, dims: Sequence[int], U, V, W, scales, ctx: FieldContext):
        dims = tuple(int(d) for d in dims)
        U, V, W = (ctx.array(np.asarray(M).reshape(-1, n)) for M, n in zip((U, V, W), dims))
        scales = ctx.array(np.asarray(scales).reshape(-1))
        if not (U.shape[0] == V.shape[0] == W.shape[0] == scales.shape[0]):
            raise ParameterError("factor matrices disagree on the number of terms")
        self.dims: Dims = dims
        self.ctx = ctx
        self.U, self.V, self.W, self.scales = U, V, W, scales

    @classmethod
    def from_terms(cls, dims: Sequence[int], terms: Sequence[RankOneTerm], ctx: FieldContext) -> "Decomposition":
        for term in terms:
            if (len(term.u), len(term.v), len(term.w)) != tuple(dims):
                raise ParameterError(f"term with lengths {(len(term.u), len(term.v), len(term.w))} does not match dims {tuple(dims)}")
        if not terms:
            return cls(dims, np.zeros((0, dims[0])), np.zeros((0, dims[1])), np.zeros((0, dims[2])), [], ctx)
        return cls(
            dims,
            [t.u for t in terms],
            [t.v for t in terms],
            [t.w for t in terms],
            [t.scale for t in terms],
            ctx,
        )

    @property
    def rank(self) -> int:
        return int(self.scales.shape[0])

    def __len__(self) -> int:
        return self.rank

    @property
    def terms(self) -> List[RankOneTerm]:
        return list(self.iter_terms())

    def iter_terms(self) -> Iterator[RankOneTerm]:
        for t in range(self.rank):
            yield RankOneTerm(self.U[t], self.V[t], self.W[t], int(self.scales[t]))

    def with_scale(self, t: int, scale: int) -> "Decomposition":
        scales = self.scales.copy()
        scales[t] = scale % self.ctx.p
        return Decomposition(self.dims, self.U, self.V, self.W, scales, self.ctx)

    def truncated(self, rank: int) -> "Decomposition":
        return Decomposition(self.dims, self.U[:rank], self.V[:rank], self.W[:rank], self.scales[:rank], self.ctx)


def _guard(size: int, max_entries: int, what: str) -> None:
    if size > max_entries:
        raise GuardExceeded(f"{what} needs {size} entries, above the guard of {max_entries}")


def _check_vector(name: str, vec, length: int, ctx: FieldContext) -> np.ndarray:
    arr = np.asarray(vec)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise ParameterError(f"{name} has length {arr.shape[0] if arr.ndim else 0}, expected {length}")
    return ctx.array(arr)


def eval_naive(T: SparseTensor, x, y, z) -> FieldElement:
    """T(x, y, z) = sum over entries of coeff * x_i * y_j * z_k."""
    ctx = T.ctx
    x = _check_vector("x", x, T.dims[0], ctx)
    y = _check_vector("y", y, T.dims[1], ctx)
    z = _check_vector("z", z, T.dims[2], ctx)
    if not len(T):
        return 0
    I, J, K, C = T.coordinate_arrays()
    p = ctx.p
    terms = (C * x[I]) % p
    terms = (terms * y[J]) % p
    terms = (terms * z[K]) % p
    return int(sum(int(v) for v in terms) % p) if ctx.dtype is object else int(terms.sum() % p)


def kron_product(T: SparseTensor, T2: SparseTensor, max_entries: int = DEFAULT_MAX_ENTRIES) -> SparseTensor:
    """Pair indices flatten outer-major: (i, i') -> i * n' + i'."""
    if T.ctx != T2.ctx:
        raise ParameterError("Kronecker factors live in different fields")
    _guard(len(T) * len(T2), max_entries, "Kronecker product support")
    n1, n2, n3 = T2.dims
    p = T.ctx.p
    entries = {}
    for (i, j, k), a in T.entries.items():
        for (i2, j2, k2), b in T2.entries.items():
            entries[(i * n1 + i2, j * n2 + j2, k * n3 + k2)] = (a * b) % p
    dims = tuple(d * e for d, e in zip(T.dims, T2.dims))
    return SparseTensor(dims, entries, T.ctx)


def kron_power(T: SparseTensor, r: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> SparseTensor:
    if r < 1:
        raise ParameterError(f"Kronecker power needs r >= 1, got {r}")
    _guard(len(T) ** r, max_entries, f"Kronecker power r={r}")
    result = T
    for _ in range(r - 1):
        result = kron_product(result, T, max_entries)
    return result


def expand_dense(D: Decomposition, max_entries: int = DEFAULT_MAX_ENTRIES) -> np.ndarray:
    n1, n2, n3 = D.dims
    _guard(n1 * n2 * n3, max_entries, "decomposition expansion")
    ctx = D.ctx
    p = ctx.p
    acc = ctx.zeros(D.dims)
    for t in range(D.rank):
        uv = (D.U[t][:, None] * D.V[t][None, :]) % p
        uv = (uv * D.scales[t]) % p
        acc = (acc + (uv[:, :, None] * D.W[t][None, None, :]) % p) % p
    return acc


def expand_decomposition(D: Decomposition, max_entries: int = DEFAULT_MAX_ENTRIES) -> SparseTensor:
    return SparseTensor.from_dense(expand_dense(D, max_entries), D.ctx)


def verify_decomposition(D: Decomposition, T: SparseTensor, max_entries: int = DEFAULT_MAX_ENTRIES) -> bool:
    """Exact entrywise check that D expands to T over Z_p."""
    if D.dims != T.dims:
        raise ParameterError(f"decomposition dims {D.dims} differ from tensor dims {T.dims}")
    if D.ctx != T.ctx:
        raise ParameterError("decomposition and tensor live in different fields")
    logger.debug("verifying rank-%s decomposition against %s", D.rank, T)
    return bool(np.array_equal(expand_dense(D, max_entries), T.to_dense(max_entries)))


def kron_evaluation_size(D: Decomposition, r: int) -> int:
    """Largest per-leg buffer eval_kron_via_decomposition holds for power r."""
    n = max(D.dims)
    return max(D.rank**level * n ** (r - level) for level in range(r + 1))


def eval_kron_via_decomposition(
    D: Decomposition, r: int, x, y, z, max_entries: int = DEFAULT_MAX_ENTRIES
) -> FieldElement:
    """T^{⊗r}(x, y, z) evaluated through the decomposition of T.

    Each level views the current vectors as N x N^{l-1} blocks and contracts
    the leading axis with every factor row, so level l holds R^(r-l) * N^l
    values; the leaves are weighted by the r-fold Kronecker power of the
    scale vector.
    """
    if r < 0:
        raise ParameterError(f"power r must be non-negative, got {r}")
    _guard(kron_evaluation_size(D, r), max_entries, f"evaluation of the r={r} Kronecker power")
    ctx = D.ctx
    p = ctx.p
    n1, n2, n3 = D.dims
    blocks = []
    for name, vec, n in (("x", x, n1), ("y", y, n2), ("z", z, n3)):
        blocks.append(_check_vector(name, vec, n**r, ctx).reshape(1, n**r))
    weights = ctx.array([1])
    for level in range(r):
        for leg, (factors, n) in enumerate(((D.U, n1), (D.V, n2), (D.W, n3))):
            current = blocks[leg]
            batch, width = current.shape
            contracted = ctx.batched_contract(factors, current.reshape(batch, n, width // n))
            blocks[leg] = contracted.reshape(batch * D.rank, width // n)
        weights = ((weights[:, None] * D.scales[None, :]) % p).reshape(-1)
    if weights.shape[0] == 0:
        return 0
    xs, ys, zs = (b.reshape(-1) for b in blocks)
    leaves = (weights * xs) % p
    leaves = (leaves * ys) % p
    leaves = (leaves * zs) % p
    return int(sum(int(v) for v in leaves) % p)


def certify_decomposition_randomized(
    D: Decomposition, T: SparseTensor, trials: int, rng: np.random.Generator
) -> bool:
    """Agreement of D and T at ``trials`` uniform points (one-sided: False is definite)."""
    if D.dims != T.dims:
        raise ParameterError(f"decomposition dims {D.dims} differ from tensor dims {T.dims}")
    ctx = T.ctx
    for _ in range(trials):
        x, y, z = (ctx.random_vector(rng, n) for n in T.dims)
        if eval_kron_via_decomposition(D, 1, x, y, z) != eval_naive(T, x, y, z):
            logger.debug("decomposition disagrees with the tensor at a random point")
            return False
    return True


def rank_mod_p(matrix: np.ndarray, ctx: FieldContext) -> int:
    """Rank of a dense matrix over Z_p by Gaussian elimination."""
    p = ctx.p
    M = ctx.array(matrix).copy()
    if M.ndim != 2 or 0 in M.shape:
        return 0
    if M.shape[0] > M.shape[1]:
        M = M.T.copy()
    rows, cols = M.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.nonzero(M[rank:, col] != 0)[0]
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            M[[rank, pivot]] = M[[pivot, rank]]
        M[rank] = (M[rank] * ctx.inv(int(M[rank, col]))) % p
        others = np.nonzero(M[:, col] != 0)[0]
        others = others[others != rank]
        if others.size:
            factors = M[others, col].copy()
            M[others] = (M[others] - (factors[:, None] * M[rank][None, :]) % p) % p
        rank += 1
    return rank


def flattening_rank(T: SparseTensor, leg: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> int:
    """Rank of the n_leg x (product of the other dims) unfolding."""
    if leg not in (1, 2, 3):
        raise ParameterError(f"leg must be 1, 2 or 3, got {leg}")
    dense = T.to_dense(max_entries)
    unfolded = np.moveaxis(dense, leg - 1, 0).reshape(T.dims[leg - 1], -1)
    return rank_mod_p(unfolded, T.ctx)


def decomposition_to_file(D: Decomposition) -> DecompositionFile:
    return DecompositionFile(
        p=D.ctx.p,
        dims=list(D.dims),
        terms=[
            TermFile(u=[int(a) for a in t.u], v=[int(b) for b in t.v], w=[int(c) for c in t.w], scale=int(t.scale))
            for t in D.iter_terms()
        ],
    )


def decomposition_from_file(doc: DecompositionFile) -> Decomposition:
    try:
        ctx = FieldContext(doc.p)
    except ParameterError as e:
        raise InputError(f"decomposition modulus: {e}") from e
    dims = tuple(doc.dims)
    if any(d < 1 for d in dims):
        raise InputError(f"decomposition dims must be positive, got {list(dims)}")
    for position, term in enumerate(doc.terms):
        for name, vec, n in (("u", term.u, dims[0]), ("v", term.v, dims[1]), ("w", term.w, dims[2])):
            if len(vec) != n:
                raise InputError(f"terms.{position}.{name}: length {len(vec)}, expected {n}")
            if any(not 0 <= a < doc.p for a in vec):
                raise InputError(f"terms.{position}.{name}: values must be residues in [0, {doc.p})")
        if not 0 <= term.scale < doc.p:
            raise InputError(f"terms.{position}.scale: value must be a residue in [0, {doc.p})")
    terms = [RankOneTerm(np.array(t.u, dtype=object), np.array(t.v, dtype=object), np.array(t.w, dtype=object), t.scale) for t in doc.terms]
    return Decomposition.from_terms(dims, terms, ctx)


def tensor_to_file(T: SparseTensor) -> SparseTensorFile:
    return SparseTensorFile(
        p=T.ctx.p,
        dims=list(T.dims),
        entries=[[i, j, k, c] for (i, j, k), c in sorted(T.entries.items())],
    )


def tensor_from_file(doc: SparseTensorFile) -> SparseTensor:
    try:
        ctx = FieldContext(doc.p)
        entries = {}
        for position, row in enumerate(doc.entries):
            if len(row) != 4:
                raise InputError(f"entries.{position}: expected [i, j, k, c], got {row}")
            entries[tuple(row[:3])] = row[3]
        return SparseTensor(doc.dims, entries, ctx)
    except ParameterError as e:
        raise InputError(str(e)) from e
