"""Finite-dimensional associative unital algebras over F_p and their modules.

An algebra is given by structure constants ``c[i,j,k]`` meaning
``b_i * b_j = sum_k c[i,j,k] b_k``; a module is a tuple of action matrices,
one per algebra basis element; a map of modules is an intertwining matrix.
On top of these the module supplies the abelian-category toolkit every
higher layer uses: kernels, cokernels, images, biproducts, pullbacks,
pushouts, Hom spaces, isomorphism testing and Krull-Schmidt bookkeeping.

Convention: elements multiply like functions compose, ``(a*b)`` acts by
``b`` first.  For path algebras, paths are stored in traversal order and
``compose(q, p)`` is the path "p then q".
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import ExactMatrix, LinalgError, hstack, vstack

__all__ = [
    "AlgebraError",
    "IsoInconclusive",
    "DecomposeError",
    "Algebra",
    "Module",
    "ModuleMap",
    "ShortExactSequence",
    "Path",
    "make_path_algebra",
    "tensor_algebra",
    "module_from_rep",
    "zero_module",
    "zero_map",
    "hom_basis",
    "hom_dim",
    "factor",
    "Factorization",
    "kernel_of",
    "image_of",
    "cokernel_of",
    "pullback",
    "pushout",
    "direct_sum",
    "DirectSum",
    "is_isomorphic",
    "find_isomorphism",
    "decompose",
    "split_indecomposables",
    "dual_module",
    "dual_map",
]


class AlgebraError(ValueError):
    pass


class IsoInconclusive(AlgebraError):
    """Isomorphism search ran out of budget without a certificate."""


class DecomposeError(AlgebraError):
    """Module is not in the additive closure of the catalog, or the catalog
    is incomplete."""


_uid_counter = itertools.count(1)


def _mod_equal(a: np.ndarray, b: np.ndarray, p: int) -> bool:
    return np.array_equal(a % p, b % p)


def _safe_einsum(spec: str, *arrays: np.ndarray, p: int) -> np.ndarray:
    """einsum followed by reduction mod p, falling back to exact Python
    integers when int64 could overflow."""
    if p > 2**15:
        out = np.einsum(spec, *[a.astype(object) for a in arrays])
        return (out % p).astype(np.int64)
    return np.einsum(spec, *arrays) % p


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    """A directed path, stored as arrow indices in traversal order."""

    arrows: Tuple[int, ...]
    source: object
    target: object

    @property
    def length(self) -> int:
        return len(self.arrows)

    def compose_after(self, other: "Path") -> "Path":
        """The path "other then self"; requires self.source == other.target."""
        if self.source != other.target:
            raise AlgebraError("paths are not composable")
        return Path(other.arrows + self.arrows, other.source, self.target)


# ---------------------------------------------------------------------------
# algebras


class Algebra:
    """Associative unital algebra over F_p given by structure constants.

    Optional metadata speeds up the homological machinery when available:
    ``generator_elements`` (a generating set: intertwining only needs to be
    checked against generators), ``radical_elements`` (a basis of the
    Jacobson radical), ``primitive_idempotents`` (a complete orthogonal
    set), and ``paths``/``quiver`` for path-algebra quotients.
    """

    def __init__(
        self,
        p: int,
        structure: np.ndarray,
        unit: Sequence[int],
        basis_labels: Optional[Sequence[str]] = None,
        name: str = "",
        generator_elements: Optional[List[np.ndarray]] = None,
        radical_elements: Optional[List[np.ndarray]] = None,
        primitive_idempotents: Optional[List[np.ndarray]] = None,
        paths: Optional[List[Path]] = None,
        quiver=None,
        validate: bool = True,
    ):
        ExactMatrix.zeros(0, 0, p)  # primality and size check
        self.p = int(p)
        c = np.array(structure, dtype=np.int64) % self.p
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[1] != c.shape[2]:
            raise AlgebraError(f"structure tensor must be cubic, got {c.shape}")
        c.setflags(write=False)
        self.structure = c
        self.dim = c.shape[0]
        u = np.array(unit, dtype=np.int64) % self.p
        if u.shape != (self.dim,):
            raise AlgebraError("unit vector has wrong length")
        u.setflags(write=False)
        self.unit = u
        self.basis_labels = list(basis_labels) if basis_labels else [f"b{i}" for i in range(self.dim)]
        self.name = name or f"algebra(dim {self.dim}, p {self.p})"
        self.generator_elements = generator_elements
        self.radical_elements = radical_elements
        self.primitive_idempotents = primitive_idempotents
        self.paths = paths
        self.quiver = quiver
        self._cache: Dict = {}
        if validate:
            self._validate()

    def _validate(self) -> None:
        c, p, d = self.structure, self.p, self.dim
        if d == 0:
            raise AlgebraError("zero algebra is not unital")
        lhs = _safe_einsum("ijm,mkl->ijkl", c, c, p=p)
        rhs = _safe_einsum("jkm,iml->ijkl", c, c, p=p)
        if not np.array_equal(lhs, rhs):
            raise AlgebraError("structure constants are not associative")
        eye = np.eye(d, dtype=np.int64)
        if not np.array_equal(_safe_einsum("i,ijk->jk", self.unit, c, p=p), eye):
            raise AlgebraError("unit is not a left identity")
        if not np.array_equal(_safe_einsum("j,ijk->ik", self.unit, c, p=p), eye):
            raise AlgebraError("unit is not a right identity")

    # -- element arithmetic --------------------------------------------

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return _safe_einsum("i,j,ijk->k", x % self.p, y % self.p, self.structure, p=self.p)

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> x*y in the basis."""
        return _safe_einsum("i,ijk->kj", x % self.p, self.structure, p=self.p)

    def right_mult_matrix(self, y: np.ndarray) -> np.ndarray:
        """Matrix of x -> x*y in the basis."""
        return _safe_einsum("j,ijk->ki", y % self.p, self.structure, p=self.p)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def generators(self) -> List[np.ndarray]:
        if self.generator_elements is not None:
            return self.generator_elements
        return [self.basis_vector(i) for i in range(self.dim)]

    def compatible(self, other: "Algebra") -> bool:
        if self is other:
            return True
        return (
            self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.structure, other.structure)
            and np.array_equal(self.unit, other.unit)
        )

    def require_compatible(self, other: "Algebra") -> None:
        if not self.compatible(other):
            raise AlgebraError(f"algebra mismatch: {self.name} vs {other.name}")

    def opposite(self) -> "Algebra":
        """The opposite algebra, with multiplication reversed."""
        if "op" not in self._cache:
            c_op = np.ascontiguousarray(self.structure.transpose(1, 0, 2))
            op = Algebra(
                self.p,
                c_op,
                self.unit,
                basis_labels=self.basis_labels,
                name=self.name + "^op",
                generator_elements=self.generator_elements,
                radical_elements=self.radical_elements,
                primitive_idempotents=self.primitive_idempotents,
                validate=False,
            )
            op._cache["op"] = self
            self._cache["op"] = op
        return self._cache["op"]

    def regular_module(self) -> "Module":
        """The algebra as a left module over itself."""
        if "regular" not in self._cache:
            action = np.stack([self.left_mult_matrix(self.basis_vector(i)) for i in range(self.dim)])
            self._cache["regular"] = Module(self, action, name=self.name)
        return self._cache["regular"]

    def __repr__(self) -> str:
        return f"Algebra({self.name})"


# ---------------------------------------------------------------------------
# modules and maps


class Module:
    """Finite-dimensional left module, given by one action matrix per
    algebra basis element."""

    def __init__(self, algebra: Algebra, action, name: str = "", validate: bool = True):
        self.algebra = algebra
        arr = np.array(action, dtype=np.int64) % algebra.p
        if arr.ndim != 3 or arr.shape[0] != algebra.dim or arr.shape[1] != arr.shape[2]:
            raise AlgebraError(f"action tensor must be (dim A, d, d), got {arr.shape}")
        arr.setflags(write=False)
        self.action = arr
        self.dim = arr.shape[1]
        self.name = name
        self.uid = next(_uid_counter)
        self.summands: Optional[Tuple] = None  # set by direct_sum
        if validate:
            self._validate()

    def _validate(self) -> None:
        A, c, p = self.action, self.algebra.structure, self.algebra.p
        lhs = _safe_einsum("ikl,jlm->ijkm", A, A, p=p)
        rhs = _safe_einsum("ijn,nkm->ijkm", c, A, p=p)
        if not np.array_equal(lhs, rhs):
            raise AlgebraError(f"action of {self.name or 'module'} violates the structure constants")
        one = _safe_einsum("i,ikl->kl", self.algebra.unit, A, p=p)
        if not np.array_equal(one, np.eye(self.dim, dtype=np.int64)):
            raise AlgebraError("unit does not act as the identity")

    def act_matrix(self, i: int) -> ExactMatrix:
        return ExactMatrix(self.action[i], self.algebra.p)

    def act_element(self, x: np.ndarray) -> ExactMatrix:
        m = _safe_einsum("i,ikl->kl", np.asarray(x, dtype=np.int64) % self.algebra.p, self.action, p=self.algebra.p)
        return ExactMatrix(m, self.algebra.p, copy=False)

    def is_zero(self) -> bool:
        return self.dim == 0

    def __repr__(self) -> str:
        label = self.name or f"module#{self.uid}"
        return f"Module({label}, dim {self.dim})"


class ModuleMap:
    """A module homomorphism, stored as a (target.dim x source.dim) matrix."""

    def __init__(self, source: Module, target: Module, matrix: ExactMatrix, validate: bool = True):
        source.algebra.require_compatible(target.algebra)
        if matrix.p != source.algebra.p:
            raise LinalgError("matrix characteristic differs from the algebra's")
        if matrix.shape != (target.dim, source.dim):
            raise AlgebraError(
                f"map matrix must be {target.dim}x{source.dim}, got {matrix.shape}"
            )
        self.source = source
        self.target = target
        self.matrix = matrix
        if validate:
            self._validate()

    def _validate(self) -> None:
        T = self.matrix
        for g in self.source.algebra.generators():
            left = T @ self.source.act_element(g)
            right = self.target.act_element(g) @ T
            if left != right:
                raise AlgebraError("matrix does not intertwine the actions")

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.target.dim != self.source.dim:
            raise AlgebraError("maps are not composable")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, validate=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, validate=False)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix.scale(c), validate=False)

    def is_injective(self) -> bool:
        return self.matrix.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.matrix.rank() == self.target.dim

    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __repr__(self) -> str:
        return f"ModuleMap({self.source!r} -> {self.target!r})"


def zero_module(algebra: Algebra) -> Module:
    return Module(algebra, np.zeros((algebra.dim, 0, 0), dtype=np.int64), name="0", validate=False)


def zero_map(source: Module, target: Module) -> ModuleMap:
    return ModuleMap(source, target, ExactMatrix.zeros(target.dim, source.dim, source.algebra.p), validate=False)


def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, ExactMatrix.identity(m.dim, m.algebra.p), validate=False)


class ShortExactSequence:
    """0 -> A -f-> B -g-> C -> 0, validated at construction."""

    def __init__(self, f: ModuleMap, g: ModuleMap):
        if f.target is not g.source and not (
            f.target.dim == g.source.dim and np.array_equal(f.target.action, g.source.action)
        ):
            raise AlgebraError("middle terms do not match")
        if not f.is_injective():
            raise AlgebraError("first map is not injective")
        if not g.is_surjective():
            raise AlgebraError("second map is not surjective")
        if not (g.matrix @ f.matrix).is_zero():
            raise AlgebraError("composite is not zero")
        if f.target.dim != f.source.dim + g.target.dim:
            raise AlgebraError("dimensions are not additive")
        self.f = f
        self.g = g

    @property
    def sub(self) -> Module:
        return self.f.source

    @property
    def middle(self) -> Module:
        return self.f.target

    @property
    def quotient(self) -> Module:
        return self.g.target

    def __repr__(self) -> str:
        return f"SES(0 -> {self.sub!r} -> {self.middle!r} -> {self.quotient!r} -> 0)"


# ---------------------------------------------------------------------------
# submodules, quotients, factorization


def _submodule_on_basis(M: Module, basis: ExactMatrix, name: str = "") -> Tuple[Module, ModuleMap]:
    """Module structure on the column span of ``basis`` (which must be an
    independent spanning set of an invariant subspace), with its inclusion."""
    p = M.algebra.p
    k = basis.cols
    action = np.zeros((M.algebra.dim, k, k), dtype=np.int64)
    for i in range(M.algebra.dim):
        img = M.act_matrix(i) @ basis
        coords = basis.solve(img)
        if coords is None:
            raise AlgebraError("subspace is not invariant under the action")
        action[i] = coords.array
    sub = Module(M.algebra, action, name=name, validate=False)
    incl = ModuleMap(sub, M, basis, validate=False)
    return sub, incl


def _quotient_by_subspace(M: Module, basis: ExactMatrix, name: str = "") -> Tuple[Module, ModuleMap]:
    """Quotient of M by the invariant column span of ``basis``, with the
    projection map."""
    p = M.algebra.p
    n = M.dim
    r = basis.cols
    combined = hstack([basis, ExactMatrix.identity(n, p)])
    _, pivots, _ = combined.rref()
    extra = [j - r for j in pivots if j >= r]
    if len(extra) != n - r:
        raise AlgebraError("could not extend subspace basis")
    embed = ExactMatrix(np.eye(n, dtype=np.int64)[:, extra], p, copy=False)
    full = hstack([basis, embed])
    inv = full.inverse()
    if inv is None:
        raise AlgebraError("basis columns are not independent")
    proj = inv.block(r, n, 0, n)
    action = np.zeros((M.algebra.dim, n - r, n - r), dtype=np.int64)
    for i in range(M.algebra.dim):
        action[i] = (proj @ M.act_matrix(i) @ embed).array
    quot = Module(M.algebra, action, name=name, validate=False)
    return quot, ModuleMap(M, quot, proj, validate=False)


@dataclass
class Factorization:
    kernel: Module
    kernel_inclusion: ModuleMap
    image: Module
    image_inclusion: ModuleMap
    source_to_image: ModuleMap
    cokernel: Module
    cokernel_projection: ModuleMap


def factor(f: ModuleMap) -> Factorization:
    """Kernel, image and cokernel of a map, with their structure maps."""
    kb = f.matrix.kernel_matrix()
    kernel, k_incl = _submodule_on_basis(f.source, kb, name=f"ker({f.source.name})")
    ib = f.matrix.column_space_basis()
    image, i_incl = _submodule_on_basis(f.target, ib, name="im")
    coords = ib.solve(f.matrix)
    if coords is None:
        raise AlgebraError("image coordinates failed")
    src_to_img = ModuleMap(f.source, image, coords, validate=False)
    coker, c_proj = _quotient_by_subspace(f.target, ib, name=f"coker({f.target.name})")
    return Factorization(kernel, k_incl, image, i_incl, src_to_img, coker, c_proj)


def kernel_of(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    kb = f.matrix.kernel_matrix()
    return _submodule_on_basis(f.source, kb)


def image_of(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    return _submodule_on_basis(f.target, f.matrix.column_space_basis())


def cokernel_of(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    return _quotient_by_subspace(f.target, f.matrix.column_space_basis())


# ---------------------------------------------------------------------------
# biproducts, pullbacks, pushouts


@dataclass
class DirectSum:
    module: Module
    injections: List[ModuleMap]
    projections: List[ModuleMap]


def direct_sum(modules: Sequence[Module], algebra: Optional[Algebra] = None) -> DirectSum:
    """Biproduct with block-diagonal action; the empty sum is the zero
    module."""
    modules = list(modules)
    if not modules:
        if algebra is None:
            raise AlgebraError("empty direct sum needs an explicit algebra")
        z = zero_module(algebra)
        return DirectSum(z, [], [])
    alg = modules[0].algebra
    for m in modules[1:]:
        alg.require_compatible(m.algebra)
    dims = [m.dim for m in modules]
    total = sum(dims)
    offsets = np.concatenate([[0], np.cumsum(dims)])
    action = np.zeros((alg.dim, total, total), dtype=np.int64)
    for t, m in enumerate(modules):
        a, b = offsets[t], offsets[t + 1]
        action[:, a:b, a:b] = m.action
    name = " + ".join(m.name or "?" for m in modules)
    S = Module(alg, action, name=name, validate=False)
    injections, projections = [], []
    for t, m in enumerate(modules):
        a, b = offsets[t], offsets[t + 1]
        inj = np.zeros((total, m.dim), dtype=np.int64)
        inj[a:b, :] = np.eye(m.dim, dtype=np.int64)
        injections.append(ModuleMap(m, S, ExactMatrix(inj, alg.p, copy=False), validate=False))
        proj = np.zeros((m.dim, total), dtype=np.int64)
        proj[:, a:b] = np.eye(m.dim, dtype=np.int64)
        projections.append(ModuleMap(S, m, ExactMatrix(proj, alg.p, copy=False), validate=False))
    S.summands = tuple(zip(modules, injections, projections))
    return DirectSum(S, injections, projections)


def pullback(f: ModuleMap, g: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Pullback of f: A -> C and g: B -> C; returns (P, P->A, P->B)."""
    if f.target.dim != g.target.dim or not np.array_equal(f.target.action, g.target.action):
        raise AlgebraError("pullback needs a common codomain")
    ds = direct_sum([f.source, g.source])
    h = ModuleMap(
        ds.module,
        f.target,
        hstack([f.matrix, -g.matrix]),
        validate=False,
    )
    P, incl = kernel_of(h)
    p1 = ds.projections[0].compose(incl)
    p2 = ds.projections[1].compose(incl)
    return P, p1, p2


def pushout(f: ModuleMap, g: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Pushout of f: C -> A and g: C -> B; returns (Q, A->Q, B->Q)."""
    if f.source.dim != g.source.dim or not np.array_equal(f.source.action, g.source.action):
        raise AlgebraError("pushout needs a common domain")
    ds = direct_sum([f.target, g.target])
    h = ModuleMap(
        f.source,
        ds.module,
        vstack([f.matrix, -g.matrix]),
        validate=False,
    )
    Q, proj = cokernel_of(h)
    q1 = proj.compose(ds.injections[0])
    q2 = proj.compose(ds.injections[1])
    return Q, q1, q2


# ---------------------------------------------------------------------------
# Hom spaces


_HOM_CACHE: Dict[Tuple[int, int], List[ModuleMap]] = {}


def hom_basis(M: Module, N: Module) -> List[ModuleMap]:
    """An F_p-basis of the intertwiner space Hom(M, N).

    Computed as the kernel of the linear system expressing commutation with
    a generating set of the algebra.  Direct sums are assembled blockwise
    from their summands, which keeps the linear systems small.
    """
    M.algebra.require_compatible(N.algebra)
    if M.dim == 0 or N.dim == 0:
        return []
    if M.summands is not None:
        out = []
        for part, _inj, proj in M.summands:
            for b in hom_basis(part, N):
                out.append(ModuleMap(M, N, b.matrix @ proj.matrix, validate=False))
        return out
    if N.summands is not None:
        out = []
        for part, inj, _proj in N.summands:
            for b in hom_basis(M, part):
                out.append(ModuleMap(M, N, inj.matrix @ b.matrix, validate=False))
        return out
    key = (M.uid, N.uid)
    if key in _HOM_CACHE:
        return _HOM_CACHE[key]
    p = M.algebra.p
    m, n = M.dim, N.dim
    blocks = []
    for g in M.algebra.generators():
        a = M.act_element(g).array
        b = N.act_element(g).array
        # row-major vec(T): vec(T A) = (I (x) A^T) vec, vec(B T) = (B (x) I) vec
        blocks.append(np.kron(np.eye(n, dtype=np.int64), a.T) - np.kron(b, np.eye(m, dtype=np.int64)))
    system = ExactMatrix(np.vstack(blocks) % p, p, copy=False)
    basis = []
    km = system.kernel_matrix()
    for j in range(km.cols):
        T = km.array[:, j].reshape(n, m)
        basis.append(ModuleMap(M, N, ExactMatrix(T, p), validate=False))
    _HOM_CACHE[key] = basis
    return basis


def hom_dim(M: Module, N: Module) -> int:
    return len(hom_basis(M, N))


# ---------------------------------------------------------------------------
# isomorphism testing


def _iso_candidates(basis: List[ModuleMap], budget: int, tries: int, seed: int):
    """Yield coefficient vectors: a deterministic random sample first, then
    the exhaustive scan if it fits in the budget."""
    h = len(basis)
    p = basis[0].matrix.p
    rng = random.Random(seed)
    total = p**h if h * np.log2(p) < 63 else None
    for _ in range(tries):
        yield tuple(rng.randrange(p) for _ in range(h))
    if total is not None and total <= budget:
        yield from itertools.product(range(p), repeat=h)


def find_isomorphism(
    M: Module, N: Module, budget: int = 2**14, tries: int = 64, seed: int = 0
) -> Optional[ModuleMap]:
    """An invertible intertwiner M -> N, or None when certified absent.

    Raises IsoInconclusive when the Hom space is too large to scan
    exhaustively and random sampling found nothing.
    """
    M.algebra.require_compatible(N.algebra)
    if M.dim != N.dim:
        return None
    if M.dim == 0:
        return identity_map(M) if M is N else ModuleMap(M, N, ExactMatrix.zeros(0, 0, M.algebra.p), validate=False)
    basis = hom_basis(M, N)
    if not basis:
        return None
    p = M.algebra.p
    h = len(basis)
    stacked = np.stack([b.matrix.array for b in basis])
    seen_exhaustive = p**h <= budget if h * np.log2(p) < 63 else False
    for coeffs in _iso_candidates(basis, budget, tries if not seen_exhaustive else min(tries, 8), seed):
        cand = _safe_einsum("c,ckl->kl", np.array(coeffs, dtype=np.int64), stacked, p=p)
        em = ExactMatrix(cand, p, copy=False)
        if em.rank() == M.dim:
            return ModuleMap(M, N, em, validate=False)
    if seen_exhaustive:
        return None
    raise IsoInconclusive(
        f"Hom space of dimension {h} over F_{p} exceeds the scan budget"
    )


def is_isomorphic(M: Module, N: Module, budget: int = 2**14, seed: int = 0) -> bool:
    return find_isomorphism(M, N, budget=budget, seed=seed) is not None


# ---------------------------------------------------------------------------
# Krull-Schmidt bookkeeping


def _solve_rational(G: List[List[int]], h: List[int]) -> Optional[List[Fraction]]:
    """Solve G x = h exactly; None when singular or inconsistent."""
    n = len(G)
    aug = [[Fraction(G[r][c]) for c in range(n)] + [Fraction(h[r])] for r in range(n)]
    row = 0
    pivots = []
    for col in range(n):
        pr = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if pr is None:
            continue
        aug[row], aug[pr] = aug[pr], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    if len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][n]
    return x


def decompose(
    M: Module,
    catalog: Sequence[Module],
    check: bool = True,
    budget: int = 2**12,
    tries: int = 400,
) -> List[int]:
    """Multiplicities m with M isomorphic to the direct sum of
    ``catalog[i]`` with multiplicity ``m[i]``.

    Solves the Hom-dimension system dim Hom(X_j, M) = sum_i m_i dim
    Hom(X_j, X_i), then verifies by a dimension count and an isomorphism
    spot-check against the reconstructed sum.  The catalog must consist of
    pairwise non-isomorphic indecomposables.
    """
    if not catalog:
        if M.dim == 0:
            return []
        raise DecomposeError("empty catalog cannot express a nonzero module")
    alg = M.algebra
    for X in catalog:
        alg.require_compatible(X.algebra)
    G = [[hom_dim(Xj, Xi) for Xi in catalog] for Xj in catalog]
    h = [hom_dim(Xj, M) for Xj in catalog]
    sol = _solve_rational(G, h)
    if sol is None:
        raise DecomposeError("catalog Hom matrix is singular; catalog is not a valid indecomposable list")
    mults: List[int] = []
    for x in sol:
        if x.denominator != 1 or x < 0:
            raise DecomposeError(
                f"no nonnegative integer solution: not in the additive closure of the catalog ({sol})"
            )
        mults.append(int(x))
    if sum(m * X.dim for m, X in zip(mults, catalog)) != M.dim:
        raise DecomposeError("dimension mismatch: catalog incomplete")
    if check and M.dim > 0:
        pieces: List[Module] = []
        for m, X in zip(mults, catalog):
            pieces.extend([X] * m)
        rebuilt = direct_sum(pieces, algebra=alg).module
        try:
            iso = find_isomorphism(rebuilt, M, budget=budget, tries=tries)
        except IsoInconclusive:
            iso = None
            # hom-dimension agreement plus the failed scan leaves a sliver of
            # doubt only for enormous Hom spaces; treat as verification failure
            raise DecomposeError("isomorphism spot-check inconclusive; catalog may be incomplete")
        if iso is None:
            raise DecomposeError("verification failed: not in additive closure of catalog / catalog incomplete")
    return mults


def split_indecomposables(
    M: Module, budget: int = 2**16, tries: int = 60, seed: int = 0
) -> Tuple[List[Module], bool]:
    """Indecomposable summands of M, with a certification flag.

    Splitting is constructive: a nontrivial idempotent endomorphism e gives
    M = im(e) + ker(e).  Small endomorphism rings are scanned exhaustively
    (which also certifies indecomposability); larger ones are probed with
    random endomorphisms through the Fitting decomposition
    M = ker(phi^n) + im(phi^n), leaving the result uncertified when nothing
    splits.
    """
    if M.dim == 0:
        return [], True
    end = hom_basis(M, M)
    h = len(end)
    p = M.algebra.p
    n = M.dim
    stacked = np.stack([b.matrix.array for b in end])

    def recurse(parts: List[Module]) -> Tuple[List[Module], bool]:
        out: List[Module] = []
        certified = True
        for part in parts:
            got, ok = split_indecomposables(part, budget, tries, seed)
            out.extend(got)
            certified = certified and ok
        return out, certified

    def fitting_parts(phi_arr: np.ndarray) -> Optional[List[Module]]:
        power = ExactMatrix(phi_arr, p)
        for _ in range(n.bit_length()):
            power = power @ power
        r = power.rank()
        if 0 < r < n:
            img, _ = _submodule_on_basis(M, power.column_space_basis())
            ker, _ = _submodule_on_basis(M, power.kernel_matrix())
            return [ker, img]
        return None

    scannable = h * np.log2(p) < 63 and p**h <= budget
    if scannable and p**h <= 4096:
        pass  # small End ring: the exhaustive scan below is cheapest
    else:
        rng = random.Random(seed + M.uid)
        for _ in range(tries):
            coeffs = np.array([rng.randrange(p) for _ in range(h)], dtype=np.int64)
            phi = _safe_einsum("c,ckl->kl", coeffs, stacked, p=p)
            parts = fitting_parts(phi)
            if parts:
                return recurse(parts)
    if scannable:
        eye = np.eye(n, dtype=np.int64)
        for coeffs in itertools.product(range(p), repeat=h):
            e = _safe_einsum("c,ckl->kl", np.array(coeffs, dtype=np.int64), stacked, p=p)
            if not e.any() or np.array_equal(e, eye):
                continue
            if np.array_equal(_safe_einsum("kl,lm->km", e, e, p=p), e):
                em = ExactMatrix(e, p, copy=False)
                img, _ = _submodule_on_basis(M, em.column_space_basis())
                ker, _ = _submodule_on_basis(M, em.kernel_matrix())
                return recurse([img, ker])
        return [M], True
    return [M], False


# ---------------------------------------------------------------------------
# duality


def dual_module(M: Module) -> Module:
    """The vector-space dual, a module over the opposite algebra."""
    op = M.algebra.opposite()
    action = np.ascontiguousarray(M.action.transpose(0, 2, 1))
    return Module(op, action, name=f"D({M.name})" if M.name else "", validate=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    """The transposed map between the duals, direction reversed."""
    return ModuleMap(dual_module(f.target), dual_module(f.source), f.matrix.transpose(), validate=False)


# ---------------------------------------------------------------------------
# path algebras


def _enumerate_paths(vertices, arrows, max_len: int, max_count: int) -> List[Path]:
    paths = [Path((), v, v) for v in vertices]
    frontier = list(paths)
    by_target: Dict[object, List[Tuple[int, object]]] = {v: [] for v in vertices}
    for idx, (label, s, t) in enumerate(arrows):
        by_target.setdefault(s, [])
        by_target.setdefault(t, [])
    for idx, (label, s, t) in enumerate(arrows):
        by_target[s].append((idx, t))
    while frontier:
        nxt = []
        for pth in frontier:
            if pth.length >= max_len:
                continue
            for idx, t in by_target.get(pth.target, []):
                q = Path(pth.arrows + (idx,), pth.source, t)
                nxt.append(q)
        paths.extend(nxt)
        if len(paths) > max_count:
            raise AlgebraError(
                f"path enumeration exceeded {max_count} paths; quotient looks infinite-dimensional"
            )
        frontier = nxt
    return paths


def make_path_algebra(
    quiver,
    relations: Sequence,
    p: int,
    max_path_len: int = 12,
    max_path_count: int = 20000,
    name: str = "",
) -> Algebra:
    """Quotient of the path algebra of a finite quiver by the two-sided
    ideal generated by ``relations``.

    ``quiver`` needs ``vertices`` and ``arrows`` attributes (arrows as
    (label, source, target) triples or objects with those fields).  Each
    relation is a linear combination of parallel paths of length >= 2,
    written as a list of (coeff, [arrow labels in traversal order]) pairs;
    a bare arrow-label list is shorthand for a single monomial.

    The finite-dimensionality of the quotient is certified within
    ``max_path_len``: if a basis path of maximal enumerated length
    survives reduction, the construction errors out.
    """
    vertices = list(quiver.vertices)
    raw_arrows = []
    for a in quiver.arrows:
        if hasattr(a, "label"):
            raw_arrows.append((a.label, a.source, a.target))
        else:
            raw_arrows.append((a[0], a[1], a[2]))
    label_to_idx = {lbl: i for i, (lbl, _, _) in enumerate(raw_arrows)}
    if len(label_to_idx) != len(raw_arrows):
        raise AlgebraError("arrow labels must be unique")

    paths = _enumerate_paths(vertices, raw_arrows, max_path_len, max_path_count)
    # longest first so reduction rewrites long paths into shorter ones
    order = sorted(range(len(paths)), key=lambda i: (-paths[i].length, i))
    col_of = {paths[i]: pos for pos, i in enumerate(order)}
    ordered = [paths[i] for i in order]
    npaths = len(ordered)

    def norm_relation(rel) -> List[Tuple[int, Path]]:
        if rel and not isinstance(rel[0], (tuple, list)) or (
            rel and isinstance(rel[0], (tuple, list)) and len(rel[0]) != 2
        ):
            rel = [(1, rel)]
        elif rel and isinstance(rel[0], (tuple, list)) and len(rel[0]) == 2 and not isinstance(rel[0][1], (tuple, list, str)):
            rel = [(1, rel)]
        out = []
        for coeff, labels in rel:
            idxs = tuple(label_to_idx[l] for l in labels)
            if not idxs:
                raise AlgebraError("relation terms must have length >= 2")
            src = raw_arrows[idxs[0]][1]
            cur = src
            for i in idxs:
                if raw_arrows[i][1] != cur:
                    raise AlgebraError(f"arrows in relation term {labels} do not compose")
                cur = raw_arrows[i][2]
            out.append((int(coeff) % p, Path(idxs, src, cur)))
        out = [(c, pth) for c, pth in out if c]
        if not out:
            raise AlgebraError("relation is zero")
        lens = {pth.length for _, pth in out}
        if min(lens) < 2:
            raise AlgebraError("relation terms must be paths of length >= 2")
        srcs = {pth.source for _, pth in out}
        tgts = {pth.target for _, pth in out}
        if len(srcs) != 1 or len(tgts) != 1:
            raise AlgebraError("relation terms must be parallel paths")
        return out

    rels = [norm_relation(r) for r in relations]

    rows = []
    for rel in rels:
        src = rel[0][1].source
        tgt = rel[0][1].target
        lefts = [q for q in paths if q.source == tgt]
        rights = [q for q in paths if q.target == src]
        for u in lefts:
            for v in rights:
                terms = []
                ok = True
                for coeff, t in rel:
                    w = Path(v.arrows + t.arrows + u.arrows, v.source, u.target)
                    if w.length > max_path_len:
                        ok = False
                        break
                    terms.append((coeff, w))
                if not ok:
                    continue
                row = np.zeros(npaths, dtype=np.int64)
                for coeff, w in terms:
                    row[col_of[w]] = (row[col_of[w]] + coeff) % p
                if row.any():
                    rows.append(row)

    if rows:
        ideal = ExactMatrix(np.array(rows, dtype=np.int64), p, copy=False)
        reduced, pivots, _ = ideal.rref()
        pivot_set = set(pivots)
        red_rows = reduced.array
    else:
        pivot_set = set()
        red_rows = np.zeros((0, npaths), dtype=np.int64)
        pivots = []

    residue_cols = [j for j in range(npaths) if j not in pivot_set]
    residues = [ordered[j] for j in residue_cols]
    max_res_len = max((r.length for r in residues), default=0)
    if max_res_len >= max_path_len:
        raise AlgebraError(
            f"quotient not certified finite-dimensional within path length {max_path_len}; raise max_path_len"
        )
    if relations and 2 * max_res_len > max_path_len:
        raise AlgebraError("max_path_len too small to multiply basis paths; raise it")

    def reduce_vec(vec: np.ndarray) -> np.ndarray:
        v = vec % p
        for r, pc in enumerate(pivots):
            c = v[pc]
            if c:
                v = (v - c * red_rows[r]) % p
        return v

    res_col = {pth: i for i, pth in enumerate(residues)}
    dim = len(residues)
    structure = np.zeros((dim, dim, dim), dtype=np.int64)
    for i, pi in enumerate(residues):
        for j, pj in enumerate(residues):
            if pi.source != pj.target:
                continue
            prod = Path(pj.arrows + pi.arrows, pj.source, pi.target)
            vec = np.zeros(npaths, dtype=np.int64)
            vec[col_of[prod]] = 1
            vec = reduce_vec(vec)
            for pos in np.nonzero(vec)[0]:
                structure[i, j, res_col[ordered[pos]]] = vec[pos]

    unit = np.zeros(dim, dtype=np.int64)
    labels = []
    trivial_idx = []
    arrow_idx = []
    for i, pth in enumerate(residues):
        if pth.length == 0:
            unit[i] = 1
            trivial_idx.append(i)
            labels.append(f"e_{pth.source}")
        else:
            labels.append("".join(raw_arrows[a][0] for a in reversed(pth.arrows)))
            if pth.length == 1:
                arrow_idx.append(i)

    def basis_vec(i):
        v = np.zeros(dim, dtype=np.int64)
        v[i] = 1
        return v

    generators = [basis_vec(i) for i in trivial_idx + arrow_idx]
    radical = [basis_vec(i) for i, pth in enumerate(residues) if pth.length > 0]

    alg = Algebra(
        p,
        structure,
        unit,
        basis_labels=labels,
        name=name or "path algebra quotient",
        generator_elements=generators,
        paths=list(residues),
        quiver=quiver,
    )
    if _certify_nilpotent(alg, radical):
        alg.radical_elements = radical
    prim = [basis_vec(i) for i in trivial_idx]
    if _certify_primitive(alg, prim):
        alg.primitive_idempotents = prim
    return alg


def _certify_nilpotent(alg: Algebra, elements: List[np.ndarray]) -> bool:
    """True when the span of ``elements`` is a nilpotent subspace under
    left multiplication (certifies it is the radical over the semisimple
    quotient by trivial paths)."""
    if not elements:
        return True
    span = np.array(elements, dtype=np.int64)
    current = span
    for _ in range(alg.dim + 1):
        prods = []
        for x in current:
            for y in span:
                prods.append(alg.multiply(x, y))
        if not prods:
            return True
        mat = ExactMatrix(np.array(prods, dtype=np.int64), alg.p, copy=False)
        reduced, pivots, rank = mat.rref()
        if rank == 0:
            return True
        current = reduced.array[:rank]
    return False


def _certify_primitive(alg: Algebra, idems: List[np.ndarray], budget: int = 2**12) -> bool:
    """Check each candidate idempotent e is primitive by scanning e*A*e for
    nontrivial idempotents."""
    for e in idems:
        le = alg.left_mult_matrix(e)
        re = alg.right_mult_matrix(e)
        corner = ExactMatrix((le @ re) % alg.p, alg.p, copy=False)
        basis = corner.column_space_basis()
        k = basis.cols
        if k * np.log2(alg.p) > 62 or alg.p**k > budget:
            return False
        cols = basis.array
        for coeffs in itertools.product(range(alg.p), repeat=k):
            x = (cols @ np.array(coeffs, dtype=np.int64)) % alg.p
            if not x.any() or np.array_equal(x, e):
                continue
            if np.array_equal(alg.multiply(x, x), x):
                return False
    return True


# ---------------------------------------------------------------------------
# tensor products (used to see quiver representations as modules)


def tensor_algebra(A: Algebra, B: Algebra) -> Algebra:
    """A (x) B with basis pairs ordered (i, j) -> i * dim(B) + j."""
    if A.p != B.p:
        raise AlgebraError("tensor factors must share the characteristic")
    key = ("tensor", id(B))
    if key in A._cache:
        return A._cache[key]
    p = A.p
    dA, dB = A.dim, B.dim
    c = _safe_einsum("ikm,jln->ijklmn", A.structure, B.structure, p=p)
    c = c.reshape(dA * dB, dA * dB, dA * dB)
    unit = np.kron(A.unit, B.unit) % p
    labels = [f"{a}(x){b}" for a in A.basis_labels for b in B.basis_labels]
    gens = None
    if A.generator_elements is not None or B.generator_elements is not None:
        gens = [np.kron(g, B.unit) % p for g in A.generators()]
        gens += [np.kron(A.unit, g) % p for g in B.generators()]
    alg = Algebra(
        p,
        c,
        unit,
        basis_labels=labels,
        name=f"{A.name}(x){B.name}",
        generator_elements=gens,
        validate=False,
    )
    if A.radical_elements is not None and B.radical_elements is not None:
        rad = []
        for r in A.radical_elements:
            for j in range(dB):
                rad.append(np.kron(r, B.basis_vector(j)) % p)
        for i in range(dA):
            for r in B.radical_elements:
                rad.append(np.kron(A.basis_vector(i), r) % p)
        mat = ExactMatrix(np.array(rad, dtype=np.int64).reshape(len(rad), -1), p, copy=False)
        reduced, _, rank = mat.rref()
        rad_basis = [reduced.array[i] for i in range(rank)]
        if _certify_nilpotent(alg, rad_basis):
            alg.radical_elements = rad_basis
    if A.primitive_idempotents is not None and B.primitive_idempotents is not None:
        prim = [
            np.kron(e, f) % p
            for e in A.primitive_idempotents
            for f in B.primitive_idempotents
        ]
        if _certify_primitive(alg, prim):
            alg.primitive_idempotents = prim
    A._cache[key] = alg
    return alg


def module_from_rep(algebra: Algebra, vertex_dims: Dict, arrow_matrices: Dict, name: str = "") -> Module:
    """Module over a path-algebra quotient from representation data: a
    dimension per vertex and a matrix per arrow label."""
    if algebra.paths is None or algebra.quiver is None:
        raise AlgebraError("algebra carries no path metadata")
    p = algebra.p
    vertices = list(algebra.quiver.vertices)
    raw_arrows = []
    for a in algebra.quiver.arrows:
        if hasattr(a, "label"):
            raw_arrows.append((a.label, a.source, a.target))
        else:
            raw_arrows.append((a[0], a[1], a[2]))
    dims = {v: int(vertex_dims.get(v, 0)) for v in vertices}
    offsets = {}
    total = 0
    for v in vertices:
        offsets[v] = total
        total += dims[v]
    mats = {}
    for lbl, s, t in raw_arrows:
        m = arrow_matrices.get(lbl)
        if m is None:
            m = ExactMatrix.zeros(dims[t], dims[s], p)
        elif not isinstance(m, ExactMatrix):
            m = ExactMatrix(np.array(m, dtype=np.int64).reshape(dims[t], dims[s]), p)
        if m.shape != (dims[t], dims[s]):
            raise AlgebraError(f"arrow {lbl} matrix must be {dims[t]}x{dims[s]}")
        mats[lbl] = m
    action = np.zeros((algebra.dim, total, total), dtype=np.int64)
    for i, pth in enumerate(algebra.paths):
        if pth.length == 0:
            v = pth.source
            a = offsets[v]
            action[i, a : a + dims[v], a : a + dims[v]] = np.eye(dims[v], dtype=np.int64)
        else:
            first = raw_arrows[pth.arrows[0]]
            block = mats[first[0]].array
            for aidx in pth.arrows[1:]:
                lbl = raw_arrows[aidx][0]
                block = (mats[lbl].array @ block) % p
            s, t = pth.source, pth.target
            action[i, offsets[t] : offsets[t] + dims[t], offsets[s] : offsets[s] + dims[s]] = block
    return Module(algebra, action, name=name)
