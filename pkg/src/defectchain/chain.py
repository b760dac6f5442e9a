"""Anyonic chains on an edge basis: state enumeration and Hamiltonian assembly.

States are labelings ``(e_0, …, e_{n-1})`` of the horizontal edges of a fusion
chain whose vertical strands all carry the same label ``X``. For the defect
chain (``X = *`` over the labels ``0, 1, *``) category edges and defect edges
strictly alternate, so each site is either a qubit ``{0, 1}`` or the defect
``*`` — the local ``ℂ ⊕ ℂ²`` kinematics.

Two independent assembly routes are provided:

* :func:`golden_chain_hamiltonian` — generic, from the F-symbols of any
  multiplicity-free category: ``h_i = -d_X · P^{(i)}_1`` where ``P^{(i)}_1`` projects
  the two strands adjacent to edge ``i`` onto the unit channel;
* :func:`defect_chain_hamiltonian` — the explicit three-edge operator
  ``h_i = -(1/√2) (𝕀 + (Z⊕Ô) ⊗ |*⟩⟨*| ⊗ (Z⊕Ô) + |*⟩⟨*| ⊗ (X⊕Ô) ⊗ |*⟩⟨*|)``.

Matrix entries are accumulated exactly in :class:`~defectchain.scalar.Scalar`
and converted to complex doubles once per entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .fusion import STAR, FusionCategory, ising
from .scalar import Scalar

__all__ = ['Boundary', 'ChainBasis', 'ChainOperator', 'ChainError', 'enumerate_states', 'golden_chain_basis',
           'golden_chain_hamiltonian', 'defect_chain_hamiltonian', 'defect_local_operator', 'parse_boundary',
           'CATEGORY', 'DEFECT_LABELS', 'free_sectors']

#: wildcard boundary label: any category (non-defect) label
CATEGORY = 'c'
#: edge alphabet of the defect chain, in enumeration order
DEFECT_LABELS = (0, 1, STAR)


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class Boundary:
    """Boundary condition of a chain.

    ``kind`` is ``'fixed'`` (``left``/``right`` pin the first and last edge; each may be a
    label or the wildcard :data:`CATEGORY`), ``'free'`` or ``'periodic'``.
    """
    kind: str
    left: object = None
    right: object = None

    @classmethod
    def fixed(cls, left, right) -> 'Boundary':
        return cls('fixed', left, right)

    @classmethod
    def free(cls) -> 'Boundary':
        return cls('free')

    @classmethod
    def periodic(cls) -> 'Boundary':
        return cls('periodic')

    def __str__(self):
        return f"fixed({self.left},{self.right})" if self.kind == 'fixed' else self.kind

    def to_json(self):
        return {'kind': self.kind, 'left': self.left, 'right': self.right}


def _parse_label(tok: str):
    tok = tok.strip()
    return int(tok) if tok.lstrip('-').isdigit() else tok


def parse_boundary(spec) -> Boundary:
    """Parse ``"*,*"``, ``"0,c"``, ``"free"`` or ``"periodic"`` (or pass a :class:`Boundary` through)."""
    if isinstance(spec, Boundary):
        return spec
    if isinstance(spec, (tuple, list)) and len(spec) == 2:
        return Boundary.fixed(*spec)
    s = str(spec).strip()
    if s in ('free', 'periodic'):
        return Boundary(s)
    parts = s.split(',')
    if len(parts) != 2:
        raise ChainError(f"cannot parse boundary {spec!r}")
    return Boundary.fixed(_parse_label(parts[0]), _parse_label(parts[1]))


def _matches(label, pin) -> bool:
    if pin == CATEGORY:
        return label != STAR
    return label == pin


@dataclass
class ChainBasis:
    """Ordered admissible edge labelings.

    Attributes
    ----------
    n_edges : int
    boundary : Boundary
    states : list of tuples
    index : dict state -> position
    flag : str
        Explanation when the basis is empty because of a boundary/parity mismatch.
    """
    n_edges: int
    boundary: Boundary
    states: list
    flag: str = ''
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self):
        return len(self.states)

    def sectors(self) -> list[tuple]:
        """Boundary patterns ``(e_0 is defect, e_{n-1} is defect)`` present in the basis."""
        return sorted({(s[0] == STAR, s[-1] == STAR) for s in self.states})

    def to_json(self) -> dict:
        return {'n_edges': self.n_edges, 'boundary': self.boundary.to_json(),
                'states': [list(s) for s in self.states], 'flag': self.flag}


def is_alternating(state: Sequence) -> bool:
    """No two adjacent defect edges and no two adjacent category edges."""
    return all((a == STAR) != (b == STAR) for a, b in zip(state, state[1:]))


def enumerate_states(n_edges: int, boundary) -> ChainBasis:
    """Admissible defect-chain states over ``(0, 1, *)`` in lexicographic order.

    Adjacent edges alternate between the category sector ``{0, 1}`` and the defect ``*``.
    ``boundary`` is ``fixed(l, r)`` (labels or the wildcard ``'c'``) or ``free``.
    """
    if n_edges < 2:
        raise ChainError("need at least two edges")
    boundary = parse_boundary(boundary)
    if boundary.kind == 'periodic':
        raise ChainError("periodic boundary is only supported by golden_chain_hamiltonian")
    states = []
    for first_is_defect in (False, True):
        pattern = [(i % 2 == 0) == first_is_defect for i in range(n_edges)]
        choices = [(STAR,) if d else (0, 1) for d in pattern]
        for st in itertools.product(*choices):
            if boundary.kind == 'fixed' and not (_matches(st[0], boundary.left) and _matches(st[-1], boundary.right)):
                continue
            states.append(st)
    order = {lab: i for i, lab in enumerate(DEFECT_LABELS)}
    states.sort(key=lambda s: tuple(order[x] for x in s))
    flag = ''
    if not states:
        flag = (f"boundary {boundary} is incompatible with the alternation of defect and category edges "
                f"on {n_edges} edges")
    return ChainBasis(n_edges, boundary, states, flag)


def free_sectors(n_edges: int) -> list[Boundary]:
    """The two fixed-boundary sectors whose direct sum is the free-boundary space."""
    if n_edges % 2:
        return [Boundary.fixed(STAR, STAR), Boundary.fixed(CATEGORY, CATEGORY)]
    return [Boundary.fixed(STAR, CATEGORY), Boundary.fixed(CATEGORY, STAR)]


def golden_chain_basis(C: FusionCategory, X, n_sites: int, boundary) -> ChainBasis:
    """Edge labelings ``x_0 … x_N`` with ``x_{i+1} ∈ x_i ⊗ X`` (``N = n_sites``), from the fusion rules."""
    boundary = parse_boundary(boundary)
    if X not in C.labels:
        raise ChainError(f"{X!r} is not a label")
    n_edges = n_sites if boundary.kind == 'periodic' else n_sites + 1
    paths = [(x,) for x in C.labels]
    for _ in range(n_edges - 1):
        paths = [p + (y,) for p in paths for y in C.fuse(p[-1], X)]
    if boundary.kind == 'periodic':
        paths = [p for p in paths if p[0] in C.fuse(p[-1], X)]
    elif boundary.kind == 'fixed':
        paths = [p for p in paths if _matches(p[0], boundary.left) and _matches(p[-1], boundary.right)]
    paths.sort(key=lambda s: tuple(C.labels.index(x) for x in s))
    flag = '' if paths else f"no admissible labelings for boundary {boundary}"
    return ChainBasis(n_edges, boundary, paths, flag)


@dataclass
class ChainOperator:
    """Sparse Hermitian operator on a :class:`ChainBasis`.

    Attributes
    ----------
    basis : ChainBasis
    matrix : scipy.sparse.csr_matrix (complex128)
    exact : dict ``(row, col) -> Scalar``
        The exact entries the float matrix was converted from.
    metadata : dict
        Term decomposition (term centers and counts by type).
    """
    basis: ChainBasis
    matrix: sp.csr_matrix
    exact: dict
    metadata: dict

    @property
    def dim(self) -> int:
        return self.basis.dim

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        diff = self.matrix - self.matrix.getH()
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol

    def restrict(self, sub: ChainBasis) -> 'ChainOperator':
        """Compress onto a subset of basis states (e.g. one boundary sector)."""
        pos = [self.basis.index[s] for s in sub.states]
        m = self.matrix[pos][:, pos].tocsr()
        inv = {p: i for i, p in enumerate(pos)}
        exact = {(inv[r], inv[c]): v for (r, c), v in self.exact.items() if r in inv and c in inv}
        return ChainOperator(sub, m, exact, dict(self.metadata, restricted_to=str(sub.boundary)))


def _assemble(basis: ChainBasis, entries: dict, metadata: dict) -> ChainOperator:
    entries = {k: v for k, v in entries.items() if v}
    n = basis.dim
    if entries:
        keys = sorted(entries)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        data = np.array([entries[k].to_complex() for k in keys], dtype=np.complex128)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0, dtype=np.complex128)
    m = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    return ChainOperator(basis, m, entries, metadata)


def _term_centers(n_edges: int, periodic: bool) -> list[int]:
    return list(range(n_edges)) if periodic else list(range(1, n_edges - 1))


def golden_chain_hamiltonian(C: FusionCategory, X, n_sites: int, boundary) -> ChainOperator:
    """``H = Σ_i h_i`` with ``h_i = -d_X Σ |x'⟩ F_{x',1} conj(F_{x,1}) ⟨x|`` on edge ``i``.

    ``F = F^{x_{i+1}}_{x_{i-1} X X}`` with ``e = x_i`` and ``f = 1`` (the unit), i.e. ``-h_i/d_X``
    is the projector onto the unit fusion channel of the two strands meeting at
    edge ``i``. Neighbouring edges are untouched. ``boundary`` may be fixed, free or
    periodic (``n_sites`` strands around a ring).
    """
    boundary = parse_boundary(boundary)
    basis = golden_chain_basis(C, X, n_sites, boundary)
    periodic = boundary.kind == 'periodic'
    dX = C.qdim[X]
    unit = C.unit
    local: dict = {}

    def term(l, r):
        key = (l, r)
        if key not in local:
            amps = {x: C.F(l, X, X, r, x, unit) for x in C.labels
                    if C.admissible(l, X, x) and C.admissible(x, X, r)}
            local[key] = amps
        return local[key]

    entries: dict = {}
    n = basis.n_edges
    centers = _term_centers(n, periodic)
    for col, st in enumerate(basis.states):
        for i in centers:
            l, r = st[(i - 1) % n], st[(i + 1) % n]
            amps = term(l, r)
            a_in = amps.get(st[i])
            if not a_in:
                continue
            for x2, a_out in amps.items():
                if not a_out:
                    continue
                new = st[:i] + (x2,) + st[i + 1:]
                row = basis.index.get(new)
                if row is None:
                    continue
                val = -(dX * a_out * a_in.conj())
                entries[(row, col)] = entries.get((row, col), Scalar(C.order)) + val
    meta = {'model': 'golden', 'category': C.name, 'strand': X, 'n_sites': n_sites,
            'boundary': str(boundary), 'term_centers': centers, 'n_terms': len(centers)}
    return _assemble(basis, entries, meta)


def defect_local_operator(kappa=1, o_hat=0, category: FusionCategory | None = None):
    """The three-edge operator ``𝕀 + (Z⊕Ô)⊗|*⟩⟨*|⊗(Z⊕Ô) + |*⟩⟨*|⊗(X⊕Ô)⊗|*⟩⟨*|`` (without prefactor).

    Returns a function ``(l, c, r) -> list of ((l, c', r), amplitude)``. The amplitude
    of the qubit flip is read off the ``(F^*_{***})`` column of the Ising data,
    ``d_*² F_{c,0} conj(F_{c',0})``, which equals 1 for both signs of ``kappa``.
    """
    C = category if category is not None else ising(kappa)
    order = C.order
    one = Scalar.one(order)
    o = o_hat if isinstance(o_hat, Scalar) else Scalar.from_rational(o_hat, order)
    d2 = C.qdim[STAR] * C.qdim[STAR]
    flip = {(c, c2): d2 * C.F(STAR, STAR, STAR, STAR, c, 0) * C.F(STAR, STAR, STAR, STAR, c2, 0).conj()
            for c in (0, 1) for c2 in (0, 1)}
    z = lambda a: o if a == STAR else (one if a == 0 else -one)

    def apply(l, c, r):
        out = [((l, c, r), one)]
        if c == STAR:
            out.append(((l, c, r), z(l) * z(r)))
        if l == STAR and r == STAR:
            if c == STAR:
                out.append(((l, c, r), o))
            else:
                out.append(((l, 1 - c, r), flip[(c, 1 - c)]))
        return out

    return apply


def defect_chain_hamiltonian(n_edges: int, boundary, kappa=1, o_hat=0,
                             category: FusionCategory | None = None) -> ChainOperator:
    """Defect-chain Hamiltonian ``H = Σ_i h_i`` on :func:`enumerate_states`.

    ``h_i = -(1/√2)(𝕀 + (Z⊕Ô)⊗|*⟩⟨*|⊗(Z⊕Ô) + |*⟩⟨*|⊗(X⊕Ô)⊗|*⟩⟨*|)`` acts on edges
    ``i-1, i, i+1`` for every interior edge ``i``. ``category`` may be a derived Ising
    table; by default ``ising(kappa)`` is used. Images falling outside the admissible
    basis are discarded (they only arise for ``Ô ≠ 0`` on forbidden states).
    """
    boundary = parse_boundary(boundary)
    basis = enumerate_states(n_edges, boundary)
    C = category if category is not None else ising(kappa)
    local = defect_local_operator(kappa, o_hat, C)
    pref = -(Scalar.one(C.order) / C.qdim[STAR])
    entries: dict = {}
    centers = _term_centers(n_edges, False)
    dropped = 0
    for col, st in enumerate(basis.states):
        for i in centers:
            for (l2, c2, r2), amp in local(st[i - 1], st[i], st[i + 1]):
                if not amp:
                    continue
                new = st[:i - 1] + (l2, c2, r2) + st[i + 2:]
                row = basis.index.get(new)
                if row is None:
                    dropped += 1
                    continue
                entries[(row, col)] = entries.get((row, col), Scalar(C.order)) + pref * amp
    # term types per alternation sector: a defect-centred term carries ZZ, a category-centred one X
    counts = {}
    for sector in basis.sectors():
        first_defect = sector[0]
        zz = sum(1 for i in centers if (i % 2 == 0) == first_defect)
        name = ','.join(STAR if d else CATEGORY for d in sector)
        counts[name] = {'identity': len(centers), 'ZZ': zz, 'X': len(centers) - zz}
    meta = {'model': 'defect-z2', 'kappa': kappa, 'n_edges': n_edges, 'boundary': str(boundary),
            'term_centers': centers, 'n_terms': len(centers), 'term_counts': counts,
            'dropped_forbidden_images': dropped}
    return _assemble(basis, entries, meta)
