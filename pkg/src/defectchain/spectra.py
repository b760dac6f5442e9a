"""Spectra of chain Hamiltonians and the transverse-field Ising reference.

The effective model of the defect chain is the open critical Ising chain

.. math::

    H = -\\frac{1}{\\sqrt{2}}\\Big(n_{\\mathbb{1}}\\,\\mathbb{1} + \\sum_{j=1}^{n-1} Z_j Z_{j+1}
        + \\sum_{j=1}^{n} X_j\\Big),

where the number of identity terms ``n_𝟙`` is a bookkeeping choice: the
defect chain on ``2n+1`` edges produces ``2n-1`` local terms, each carrying one
identity, so :func:`tfim_reference` uses ``n_𝟙 = 2n-1`` by default and the
two matrices coincide entry by entry. :func:`free_fermion_energy` defaults to
one identity per site (``n_𝟙 = n``), the per-site normalization in which the
critical energy density is ``-(1 + 4/π)/√2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .chain import ChainBasis, ChainOperator, Boundary

__all__ = ['Spectrum', 'SpectrumError', 'diagonalize', 'lanczos', 'tfim_reference', 'compare_spectra',
           'free_fermion_energy', 'free_fermion_modes', 'richardson_extrapolate', 'tfim_energy_density',
           'z2_flip_permutation', 'symmetry_blocks', 'DEGENERACY_TOL', 'COMPARE_TOL', 'DENSE_MAX_DIM']

DEGENERACY_TOL = 1e-8
COMPARE_TOL = 1e-10
DENSE_MAX_DIM = 4096
INV_SQRT2 = 1.0 / math.sqrt(2.0)


class SpectrumError(ValueError):
    pass


def _group(values: np.ndarray, tol: float) -> list[int]:
    groups = []
    for k, v in enumerate(values):
        if k and v - values[k - 1] <= tol:
            groups[-1] += 1
        else:
            groups.append(1)
    return groups


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues with multiplicities grouped at :data:`DEGENERACY_TOL`."""
    eigenvalues: np.ndarray
    source: dict = field(default_factory=dict)
    tol: float = DEGENERACY_TOL

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float))
        ev.setflags(write=False)
        object.__setattr__(self, 'eigenvalues', ev)

    @property
    def degeneracies(self) -> list[int]:
        return _group(self.eigenvalues, self.tol)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_degeneracy(self) -> int:
        return self.degeneracies[0] if len(self.eigenvalues) else 0

    def __len__(self):
        return len(self.eigenvalues)

    def union(self, other: 'Spectrum') -> 'Spectrum':
        return Spectrum(np.concatenate([self.eigenvalues, other.eigenvalues]),
                        {'union': [self.source, other.source]}, self.tol)

    def to_json(self) -> dict:
        return {'eigenvalues': [float(x) for x in self.eigenvalues], 'degeneracies': self.degeneracies,
                'source': self.source}


def _as_matrix(H):
    if isinstance(H, ChainOperator):
        return H.matrix, dict(H.metadata)
    if sp.issparse(H):
        return H.tocsr(), {}
    return np.asarray(H), {}


def _check_hermitian(m, tol=1e-12):
    diff = m - (m.getH() if sp.issparse(m) else m.conj().T)
    if sp.issparse(diff):
        err = float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
    else:
        err = float(np.max(np.abs(diff))) if diff.size else 0.0
    if err > tol:
        raise SpectrumError(f"matrix is not Hermitian (max deviation {err:.3e})")


def lanczos(matvec, dim: int, k: int = 1, tol: float = 1e-12, max_iter: int | None = None,
            seed: int = 0) -> np.ndarray:
    """Lowest ``k`` eigenvalues of a Hermitian operator by Lanczos with full reorthogonalization.

    Parameters
    ----------
    matvec : callable
        ``v ↦ H v``.
    dim : int
        Dimension of the space.
    k : int
        Number of low-lying eigenvalues.
    tol : float
        Convergence threshold on the change of the ``k`` lowest Ritz values and on the
        residual norms ``|β_m s_{m,j}|``.
    seed : int
        Seed of the (deterministic) random start vector.

    Notes
    -----
    A single Krylov sequence sees each eigenspace through one vector only, so exactly
    degenerate levels are reported once; use the dense mode to count degeneracies.
    """
    if dim == 0:
        return np.zeros(0)
    k = min(k, dim)
    max_iter = dim if max_iter is None else min(max_iter, dim)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(dim) + 0j
    q /= np.linalg.norm(q)
    Q = [q]
    alphas, betas = [], []
    prev = None
    ritz = None
    for m in range(max_iter):
        w = matvec(Q[-1])
        alpha = float(np.real(np.vdot(Q[-1], w)))
        w = w - alpha * Q[-1] - (betas[-1] * Q[-2] if betas else 0)
        Qm = np.array(Q)
        for _ in range(2):  # full reorthogonalization, twice for stability
            w = w - Qm.T @ (Qm.conj() @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)
        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        vals, vecs = np.linalg.eigh(T)
        ritz = vals[:k]
        resid = np.abs(beta * vecs[-1, :k])
        if len(alphas) >= k and (beta < tol or (prev is not None and len(prev) == len(ritz)
                                                 and np.all(np.abs(ritz - prev) < tol)
                                                 and np.all(resid < math.sqrt(tol)))):
            break
        if beta < tol:
            break
        prev = ritz
        betas.append(beta)
        Q.append(w / beta)
    if len(ritz) < k:
        raise SpectrumError("Krylov space exhausted before k eigenvalues were found (degenerate start vector)")
    return np.asarray(ritz)


def z2_flip_permutation(basis: ChainBasis) -> np.ndarray:
    """Basis permutation of the global spin flip ``0 ↔ 1`` on every edge (``*`` is fixed).

    Returns ``perm`` with ``perm[i]`` the index of the flipped state ``i``; raises
    :class:`SpectrumError` if the flipped state is not in the basis.
    """
    swap = {0: 1, 1: 0}
    perm = np.empty(basis.dim, dtype=np.int64)
    for i, st in enumerate(basis.states):
        j = basis.index.get(tuple(swap.get(x, x) for x in st))
        if j is None:
            raise SpectrumError("basis is not closed under the spin flip")
        perm[i] = j
    return perm


def symmetry_blocks(H, perm: np.ndarray, tol: float = 1e-12) -> list[np.ndarray]:
    """Dense blocks of ``H`` in the ``±1`` eigenspaces of an involutive basis permutation.

    The permutation must square to the identity and commute with ``H`` (checked to
    ``tol``). The blocks are ``Q_±^† H Q_±`` with ``Q_±`` the orthonormal (anti)symmetric
    combinations ``(e_i ± e_{perm(i)})/√2`` (and ``e_i`` for fixed points in the ``+`` block).
    """
    m, _ = _as_matrix(H)
    m = sp.csr_matrix(m)
    dim = m.shape[0]
    perm = np.asarray(perm)
    if not np.array_equal(perm[perm], np.arange(dim)):
        raise SpectrumError("permutation is not an involution")
    Pm = sp.csr_matrix((np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim))
    comm = Pm @ m - m @ Pm
    if comm.nnz and np.max(np.abs(comm.data)) > tol:
        raise SpectrumError("operator does not commute with the symmetry")
    blocks = []
    for sign in (1, -1):
        rows, cols, vals = [], [], []
        k = 0
        for i in range(dim):
            j = int(perm[i])
            if j < i:
                continue
            if j == i:
                if sign == 1:
                    rows.append(i), cols.append(k), vals.append(1.0)
                    k += 1
                continue
            rows += [i, j]
            cols += [k, k]
            vals += [INV_SQRT2, sign * INV_SQRT2]
            k += 1
        Q = sp.csr_matrix((vals, (rows, cols)), shape=(dim, k))
        blocks.append((Q.T @ m @ Q).toarray())
    return blocks


def _eigvalsh(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] == 0:
        return np.zeros(0)
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        arr = arr.real
    return np.linalg.eigvalsh(arr)


def diagonalize(H, mode: str = 'dense_full', k: int = 6, source: dict | None = None,
                symmetry: np.ndarray | None = None) -> Spectrum:
    """Eigenvalues of a Hermitian chain operator.

    Parameters
    ----------
    H : :class:`ChainOperator`, sparse matrix or ndarray
    mode : {'dense_full', 'lanczos_lowk'}
        ``'dense_full'`` returns the full spectrum (dimension ≤ :data:`DENSE_MAX_DIM`);
        ``'lanczos_lowk'`` returns the ``k`` lowest eigenvalues.
    symmetry : ndarray, optional
        Involutive basis permutation commuting with ``H`` (e.g. :func:`z2_flip_permutation`);
        in dense mode the two symmetry blocks are diagonalized separately and merged.
    """
    m, meta = _as_matrix(H)
    _check_hermitian(m)
    meta = dict(meta, **(source or {}), mode=mode)
    dim = m.shape[0]
    if mode in ('dense', 'dense_full'):
        if dim > DENSE_MAX_DIM:
            raise SpectrumError(f"dense diagonalization limited to dimension {DENSE_MAX_DIM}")
        if symmetry is not None:
            vals = np.concatenate([_eigvalsh(b) for b in symmetry_blocks(m, symmetry)])
            meta['symmetry_resolved'] = True
        else:
            vals = _eigvalsh(m.toarray() if sp.issparse(m) else np.asarray(m))
        return Spectrum(vals, meta)
    if mode in ('lanczos', 'lanczos_lowk'):
        vals = lanczos(lambda v: m @ v, dim, k)
        return Spectrum(vals, dict(meta, k=k))
    raise SpectrumError(f"unknown mode {mode!r}")


def tfim_reference(n_qubits: int, boundary: str = 'open', identity_terms: int | None = None,
                   zz_couplings: Sequence[float] | None = None) -> ChainOperator:
    """Open critical transverse-field Ising chain on ``n_qubits`` qubits.

    ``-(1/√2)(n_𝟙 𝟙 + Σ_{j<n} J_j Z_j Z_{j+1} + Σ_j X_j)`` with ``n_𝟙 = 2n-1`` by default
    (matching the term count of the defect chain on ``2n+1`` edges) and ``J_j = 1``
    unless ``zz_couplings`` is given. Qubit 1 is the most significant bit, which
    reproduces the ordering of the defect-chain basis.
    """
    if n_qubits < 1:
        raise SpectrumError("need at least one qubit")
    if boundary != 'open':
        raise SpectrumError("only open boundary conditions are supported")
    n = n_qubits
    n_id = 2 * n - 1 if identity_terms is None else identity_terms
    J = np.ones(n - 1) if zz_couplings is None else np.asarray(zz_couplings, dtype=float)
    dim = 1 << n
    idx = np.arange(dim)
    bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]  # bits[j] = state of qubit j+1
    z = [1 - 2 * b for b in bits]
    diag = np.full(dim, float(n_id))
    for j in range(n - 1):
        diag += J[j] * z[j] * z[j + 1]
    rows = [idx]
    cols = [idx]
    data = [-INV_SQRT2 * diag]
    for j in range(n):
        rows.append(idx ^ (1 << (n - 1 - j)))
        cols.append(idx)
        data.append(np.full(dim, -INV_SQRT2))
    m = sp.csr_matrix((np.concatenate(data).astype(np.complex128),
                       (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
    states = [tuple(int(b[i]) for b in bits) for i in range(dim)]
    basis = ChainBasis(n, Boundary('open'), states)
    meta = {'model': 'tfim', 'n_qubits': n, 'boundary': boundary,
            'term_counts': {'identity': n_id, 'ZZ': n - 1, 'X': n}}
    return ChainOperator(basis, m, {}, meta)


def free_fermion_modes(n_qubits: int, J: float = 1.0, h: float = 1.0) -> np.ndarray:
    """Half single-particle energies of the open chain ``-J Σ Z_j Z_{j+1} - h Σ X_j``.

    After a Jordan–Wigner transformation the chain is quadratic in Majorana
    operators; the mode energies are ``2 s_k`` with ``s_k`` the singular values of
    the ``n × n`` bidiagonal matrix with ``h`` on the diagonal and ``J`` on the
    superdiagonal. Returns the ``s_k``.
    """
    B = np.diag(np.full(n_qubits, float(h))) + np.diag(np.full(n_qubits - 1, float(J)), 1)
    return np.linalg.svd(B, compute_uv=False)


def free_fermion_energy(n_qubits: int, identity_terms: int | None = None) -> float:
    """Exact ground energy of the open critical Ising chain from its free-fermion modes.

    ``E_0 = -(1/√2)(n_𝟙 + Σ_k s_k)``; ``n_𝟙 = n_qubits`` by default (one identity per
    site). Pass ``identity_terms=2*n_qubits-1`` to match :func:`tfim_reference`.
    """
    if n_qubits < 1:
        raise SpectrumError("need at least one qubit")
    n_id = n_qubits if identity_terms is None else identity_terms
    return -INV_SQRT2 * (n_id + math.fsum(free_fermion_modes(n_qubits)))


def tfim_energy_density() -> float:
    """Bulk ground energy per site with one identity per site: ``-(1 + 4/π)/√2``."""
    return -INV_SQRT2 * (1.0 + 4.0 / math.pi)


def richardson_extrapolate(ns: Sequence[int], values: Sequence[float]) -> float:
    """Extrapolate ``f(n) = f_∞ + c_1/n + c_2/n² + …`` to ``n → ∞``.

    Fits the polynomial in ``1/n`` through all points (Neville scheme evaluated at
    ``1/n = 0``), i.e. repeated Richardson elimination of the leading corrections.
    """
    h = [1.0 / n for n in ns]
    t = [float(v) for v in values]
    m = len(t)
    for k in range(1, m):
        for i in range(m - 1, k - 1, -1):
            t[i] = t[i] + (t[i] - t[i - 1]) * h[i] / (h[i - k] - h[i])
    return t[-1]


def compare_spectra(A: Spectrum, B: Spectrum, tol: float = COMPARE_TOL, union_with: Spectrum | None = None) -> dict:
    """Multiset comparison of two spectra after sorting.

    If ``union_with`` is given, ``A`` is compared with ``B ⊎ union_with``.
    Returns ``{'equal', 'max_deviation', 'unmatched', 'tol'}`` where ``unmatched`` counts
    eigenvalues without a partner (size mismatch) or outside tolerance.
    """
    if union_with is not None:
        B = B.union(union_with)
    a, b = A.eigenvalues, B.eigenvalues
    n = min(len(a), len(b))
    dev = np.abs(a[:n] - b[:n])
    max_dev = float(dev.max()) if n else 0.0
    unmatched = int(np.sum(dev > tol)) + abs(len(a) - len(b))
    return {'equal': unmatched == 0, 'max_deviation': max_dev, 'unmatched': unmatched, 'tol': tol}
