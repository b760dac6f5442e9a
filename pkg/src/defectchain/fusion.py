"""Skeletal multiplicity-free fusion categories.

A :class:`FusionCategory` stores simple labels, fusion rules, quantum dimensions
and the F-symbol table ``(F^d_{abc})_{e,f}`` keyed by ``(a, b, c, d, e, f)``:
``e`` is the channel of ``a⊗b`` in the left-associated tree ``((ab)_e c)_d`` and
``f`` the channel of ``b⊗c`` in the right-associated tree ``(a (bc)_f)_d``.

Besides the two constructors used throughout the package (:func:`vec_zp` and
:func:`ising`) this module provides the pentagon check, the enumeration of
admissible labelings of a fusion chain and F-moves on binary fusion trees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Hashable, Mapping

from .scalar import DEFAULT_ORDER, Scalar, sqrt2

__all__ = ['FusionCategory', 'FusionError', 'vec_zp', 'ising', 'check_pentagon', 'check_unitarity',
           'check_qdims', 'admissible_labelings', 'FusionTree', 'f_move', 'inverse_f_move', 'STAR']

STAR = '*'

Label = Hashable


class FusionError(ValueError):
    """Raised for malformed category data or inadmissible fusion trees."""


@dataclass(frozen=True, eq=False)
class FusionCategory:
    """Skeletal data of a multiplicity-free fusion category.

    Parameters
    ----------
    labels : tuple
        Simple objects, in the order used for every downstream enumeration.
    unit : label
        The tensor unit.
    fusion : mapping ``(a, b) -> tuple of labels``
        Fusion channels (each with multiplicity one).
    qdim : mapping ``label -> Scalar``
    fsymbols : mapping ``(a, b, c, d, e, f) -> Scalar``
        Must be defined exactly on the admissible tuples.
    name : str
        Free-form identifier (used for reporting only).
    """
    labels: tuple
    unit: Label
    fusion: Mapping
    qdim: Mapping
    fsymbols: Mapping
    name: str = ''
    order: int = DEFAULT_ORDER
    _index: Mapping = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, 'labels', labels)
        if len(set(labels)) != len(labels):
            raise FusionError("duplicate labels")
        if self.unit not in labels:
            raise FusionError("unit is not a label")
        fusion = {}
        for a in labels:
            for b in labels:
                chans = tuple(self.fusion.get((a, b), ()))
                if len(set(chans)) != len(chans):
                    raise FusionError(f"fusion {a}x{b} has multiplicity > 1")
                if any(c not in labels for c in chans):
                    raise FusionError(f"fusion {a}x{b} produces unknown labels")
                fusion[(a, b)] = tuple(sorted(chans, key=labels.index))
        for a in labels:
            if fusion[(self.unit, a)] != (a,) or fusion[(a, self.unit)] != (a,):
                raise FusionError(f"unit law fails for {a!r}")
        object.__setattr__(self, 'fusion', MappingProxyType(fusion))
        object.__setattr__(self, 'qdim', MappingProxyType(dict(self.qdim)))
        fs = dict(self.fsymbols)
        expected = set(self.admissible_fkeys())
        if set(fs) != expected:
            missing = expected - set(fs)
            extra = set(fs) - expected
            raise FusionError(f"F-symbols not defined exactly on admissible tuples "
                              f"(missing {sorted(map(str, missing))[:3]}, extra {sorted(map(str, extra))[:3]})")
        for key in fs:
            if self.unit in key[:3] and fs[key] != 1:
                raise FusionError(f"strict unit gauge violated at {key}")
        object.__setattr__(self, 'fsymbols', MappingProxyType(fs))
        object.__setattr__(self, '_index', MappingProxyType({a: i for i, a in enumerate(labels)}))

    # basic queries
    def fuse(self, a, b) -> tuple:
        return self.fusion[(a, b)]

    def admissible(self, a, b, c) -> bool:
        """Whether ``c`` appears in ``a ⊗ b``."""
        return c in self.fusion[(a, b)]

    def dual(self, a):
        for b in self.labels:
            if self.unit in self.fusion[(a, b)]:
                return b
        raise FusionError(f"{a!r} has no dual")

    def admissible_fkeys(self):
        """Yield every admissible F-symbol key ``(a, b, c, d, e, f)`` in label order."""
        for a, b, c in itertools.product(self.labels, repeat=3):
            for e in self.fusion[(a, b)]:
                for d in self.fusion[(e, c)]:
                    for f in self.fusion[(b, c)]:
                        if d in self.fusion[(a, f)]:
                            yield (a, b, c, d, e, f)

    def F(self, a, b, c, d, e, f) -> Scalar:
        """``(F^d_{abc})_{e,f}``; zero for inadmissible labels."""
        val = self.fsymbols.get((a, b, c, d, e, f))
        return val if val is not None else Scalar(self.order)

    def fmatrix(self, a, b, c, d):
        """Row labels ``e``, column labels ``f`` and the F-matrix as nested lists of scalars."""
        es = [e for e in self.labels if self.admissible(a, b, e) and self.admissible(e, c, d)]
        fs = [f for f in self.labels if self.admissible(b, c, f) and self.admissible(a, f, d)]
        return es, fs, [[self.F(a, b, c, d, e, f) for f in fs] for e in es]

    def with_fsymbol(self, key, value) -> 'FusionCategory':
        """A copy with one F-symbol replaced (used for mutation tests)."""
        fs = dict(self.fsymbols)
        if key not in fs:
            raise FusionError(f"{key} is not an admissible F-symbol key")
        fs[key] = value
        return FusionCategory(self.labels, self.unit, dict(self.fusion), dict(self.qdim), fs,
                              name=self.name + '*', order=self.order)

    def same_data(self, other: 'FusionCategory') -> bool:
        """Exact equality of labels, fusion rules, dimensions and F-table."""
        return (self.labels == other.labels and self.unit == other.unit
                and dict(self.fusion) == dict(other.fusion) and dict(self.qdim) == dict(other.qdim)
                and dict(self.fsymbols) == dict(other.fsymbols))

    # JSON
    def to_json(self) -> dict:
        return {
            'name': self.name,
            'labels': list(self.labels),
            'unit': self.unit,
            'fusion': [[a, b, list(self.fusion[(a, b)])] for a in self.labels for b in self.labels
                       if self.fusion[(a, b)]],
            'qdim': [[a, self.qdim[a].to_json()] for a in self.labels],
            'fsymbols': [list(k) + [v.to_json()] for k, v in self.fsymbols.items()],
        }

    @classmethod
    def from_json(cls, data) -> 'FusionCategory':
        labels = tuple(data['labels'])
        fusion = {(a, b): tuple(cs) for a, b, cs in data['fusion']}
        qd = data['qdim']
        qdim = ({a: Scalar.from_json(v) for a, v in qd} if isinstance(qd, list)
                else {k: Scalar.from_json(v) for k, v in qd.items()})
        # JSON object keys are strings: map them back onto labels
        if isinstance(qd, dict):
            qdim = {next(l for l in labels if str(l) == k): v for k, v in qdim.items()}
        fsym = {tuple(row[:6]): Scalar.from_json(row[6]) for row in data['fsymbols']}
        order = max([s.order for s in fsym.values()] + [s.order for s in qdim.values()] + [DEFAULT_ORDER])
        fsym = {k: v.embed(order) for k, v in fsym.items()}
        qdim = {k: v.embed(order) for k, v in qdim.items()}
        return cls(labels, data['unit'], fusion, qdim, fsym, name=data.get('name', ''), order=order)


def vec_zp(p: int, order: int = DEFAULT_ORDER) -> FusionCategory:
    """Vec(Z/pZ) with trivial associator: labels ``0 … p-1``, fusion by addition mod p, all F = 1."""
    if not isinstance(p, int) or p < 1:
        raise FusionError("p must be a positive integer")
    labels = tuple(range(p))
    fusion = {(a, b): ((a + b) % p,) for a in labels for b in labels}
    one = Scalar.one(order)
    qdim = {a: one for a in labels}
    fs = {}
    for a, b, c in itertools.product(labels, repeat=3):
        fs[(a, b, c, (a + b + c) % p, (a + b) % p, (b + c) % p)] = one
    return FusionCategory(labels, 0, fusion, qdim, fs, name=f'Vec(Z/{p})', order=order)


def _ising_fusion():
    s = STAR
    fusion = {}
    for a in (0, 1):
        for b in (0, 1):
            fusion[(a, b)] = ((a + b) % 2,)
        fusion[(a, s)] = (s,)
        fusion[(s, a)] = (s,)
    fusion[(s, s)] = (0, 1)
    return fusion


def ising(kappa=1, order: int = DEFAULT_ORDER) -> FusionCategory:
    """The Ising category on labels ``(0, 1, '*')`` with Frobenius–Schur sign ``kappa``.

    The F-table consists of eight families (``a, b ∈ {0, 1}``)::

        (F^{a+b+c}_{abc})_{a+b,b+c} = 1      (F^*_{ab*})_{a+b,*} = 1
        (F^*_{a*b})_{*,*} = (-1)^{ab}        (F^*_{*ab})_{*,a+b} = 1
        (F^{a+b}_{a**})_{*,b} = 1            (F^b_{*a*})_{*,*} = (-1)^{ab}
        (F^{a+b}_{**a})_{b,*} = 1            (F^*_{***})_{a,b} = (-1)^{ab} kappa/√2
    """
    if kappa not in (1, -1):
        raise FusionError("kappa must be +1 or -1")
    if order % 8:
        raise FusionError("the Ising category needs a cyclotomic order divisible by 8")
    s = STAR
    one = Scalar.one(order)
    r2 = sqrt2(order)
    sign = lambda e: one if e % 2 == 0 else -one
    fs = {}
    for a, b in itertools.product((0, 1), repeat=2):
        for c in (0, 1):
            fs[(a, b, c, (a + b + c) % 2, (a + b) % 2, (b + c) % 2)] = one
        fs[(a, b, s, s, (a + b) % 2, s)] = one
        fs[(a, s, b, s, s, s)] = sign(a * b)
        fs[(s, a, b, s, s, (a + b) % 2)] = one
        fs[(a, s, s, (a + b) % 2, s, b)] = one
        fs[(s, a, s, b, s, s)] = sign(a * b)
        fs[(s, s, a, (a + b) % 2, b, s)] = one
        fs[(s, s, s, s, a, b)] = sign(a * b) * kappa / r2
    qdim = {0: one, 1: one, s: r2}
    return FusionCategory((0, 1, s), 0, _ising_fusion(), qdim, fs, name=f'Ising(kappa={kappa:+d})', order=order)


def check_pentagon(C: FusionCategory) -> dict:
    """Evaluate the pentagon identity on every admissible labeling.

    Checks ``(F^e_{fcd})_{g,l} (F^e_{abl})_{f,k} = Σ_h (F^g_{abc})_{f,h} (F^e_{ahd})_{g,k} (F^k_{bcd})_{h,l}``
    exactly. Returns ``{'ok': bool, 'checked': int, 'violations': [(a,b,c,d,e,f,g,k,l), ...]}``.
    """
    F = C.F
    fuse = C.fusion
    violations = []
    checked = 0
    for a, b, c, d in itertools.product(C.labels, repeat=4):
        for f in fuse[(a, b)]:
            for g in fuse[(f, c)]:
                for e in fuse[(g, d)]:
                    for l in fuse[(c, d)]:
                        for k in fuse[(b, l)]:
                            if e not in fuse[(a, k)]:
                                continue  # both sides vanish identically
                            checked += 1
                            lhs = F(f, c, d, e, g, l) * F(a, b, l, e, f, k)
                            rhs = Scalar(C.order)
                            for h in fuse[(b, c)]:
                                if g in fuse[(a, h)] and k in fuse[(h, d)]:
                                    rhs = rhs + F(a, b, c, g, f, h) * F(a, h, d, e, g, k) * F(b, c, d, k, h, l)
                            if lhs != rhs:
                                violations.append((a, b, c, d, e, f, g, k, l))
    return {'ok': not violations, 'checked': checked, 'violations': violations}


def check_unitarity(C: FusionCategory) -> dict:
    """Exact check that every F-matrix satisfies ``F F^† = 1``."""
    bad = []
    for a, b, c, d in itertools.product(C.labels, repeat=4):
        es, fs, mat = C.fmatrix(a, b, c, d)
        if not es and not fs:
            continue
        if len(es) != len(fs):
            bad.append((a, b, c, d))
            continue
        for i in range(len(es)):
            for j in range(len(es)):
                s = sum((mat[i][k] * mat[j][k].conj() for k in range(len(fs))), Scalar(C.order))
                if s != int(i == j):
                    bad.append((a, b, c, d))
                    break
            else:
                continue
            break
    return {'ok': not bad, 'violations': bad}


def check_qdims(C: FusionCategory) -> dict:
    """Exact check of ``d_a d_b = Σ_{c ∈ a⊗b} d_c``."""
    bad = [(a, b) for a in C.labels for b in C.labels
           if C.qdim[a] * C.qdim[b] != sum((C.qdim[c] for c in C.fusion[(a, b)]), Scalar(C.order))]
    return {'ok': not bad, 'violations': bad}


def admissible_labelings(C: FusionCategory, boundary, n_leaves: int) -> list[tuple]:
    """All internal labelings ``(x_1, …, x_{N-1})`` of a left-associated chain of ``N`` leaves.

    ``boundary = (left, right, X)``: the chain starts at ``x_0 = left``, absorbs one copy of
    the leaf label ``X`` per step (``x_{i} ∈ x_{i-1} ⊗ X``) and must end at ``x_N = right``.
    The result is sorted lexicographically by label order.
    """
    left, right, X = boundary
    if n_leaves < 1:
        raise FusionError("need at least one leaf")
    paths = [(left,)]
    for _ in range(n_leaves):
        paths = [p + (y,) for p in paths for y in C.fusion[(p[-1], X)]]
    out = [p[1:-1] for p in paths if p[-1] == right]
    key = lambda seq: tuple(C.labels.index(x) for x in seq)
    return sorted(set(out), key=key)


# ---------------------------------------------------------------------------
# Fusion trees and F-moves


@dataclass(frozen=True)
class FusionTree:
    """A binary fusion tree.

    Leaves are plain labels; an internal node is ``FusionTree(left, right, label)``
    meaning ``left ⊗ right → label``.
    """
    left: object
    right: object
    label: Label

    @staticmethod
    def top(t):
        return t.label if isinstance(t, FusionTree) else t

    @classmethod
    def comb(cls, leaves, internal, root):
        """Left-associated tree ``((…((l0 l1)_{x1} l2)_{x2} …)_root``."""
        leaves = list(leaves)
        if len(internal) != len(leaves) - 2:
            raise FusionError("comb needs len(leaves) - 2 internal labels")
        t = leaves[0]
        for leaf, lab in zip(leaves[1:], list(internal) + [root]):
            t = cls(t, leaf, lab)
        return t

    def subtree(self, path):
        t = self
        for step in path:
            t = t.left if step in ('L', 0) else t.right
        return t

    def replace(self, path, new):
        if not path:
            return new
        step, rest = path[0], path[1:]
        if step in ('L', 0):
            return FusionTree(self.left.replace(rest, new) if rest else new, self.right, self.label)
        return FusionTree(self.left, self.right.replace(rest, new) if rest else new, self.label)

    def is_admissible(self, C: FusionCategory) -> bool:
        for t in (self.left, self.right):
            if isinstance(t, FusionTree) and not t.is_admissible(C):
                return False
        return C.admissible(self.top(self.left), self.top(self.right), self.label)


def f_move(C: FusionCategory, tree: FusionTree, position=()) -> list[tuple[Scalar, FusionTree]]:
    """Re-associate ``((A B)_e C)_d → Σ_f (F^d_{abc})_{e,f} (A (B C)_f)_d`` at the node ``position``.

    ``position`` is a path of ``'L'``/``'R'`` steps from the root. Returns a list of
    ``(coefficient, tree)`` pairs with nonzero coefficients.
    """
    if not tree.is_admissible(C):
        raise FusionError("inadmissible tree")
    node = tree.subtree(position)
    if not isinstance(node, FusionTree) or not isinstance(node.left, FusionTree):
        raise FusionError("F-move needs a node whose left child is a node")
    A, B, e = node.left.left, node.left.right, node.left.label
    Cc, d = node.right, node.label
    a, b, c = FusionTree.top(A), FusionTree.top(B), FusionTree.top(Cc)
    out = []
    for f in C.labels:
        coef = C.F(a, b, c, d, e, f)
        if coef:
            out.append((coef, tree.replace(tuple(position), FusionTree(A, FusionTree(B, Cc, f), d))))
    return out


def inverse_f_move(C: FusionCategory, tree: FusionTree, position=()) -> list[tuple[Scalar, FusionTree]]:
    """Inverse of :func:`f_move`: ``(A (B C)_f)_d → Σ_e conj((F^d_{abc})_{e,f}) ((A B)_e C)_d``.

    Uses unitarity of the F-matrices.
    """
    if not tree.is_admissible(C):
        raise FusionError("inadmissible tree")
    node = tree.subtree(position)
    if not isinstance(node, FusionTree) or not isinstance(node.right, FusionTree):
        raise FusionError("inverse F-move needs a node whose right child is a node")
    A, B, Cc, f = node.left, node.right.left, node.right.right, node.right.label
    d = node.label
    a, b, c = FusionTree.top(A), FusionTree.top(B), FusionTree.top(Cc)
    out = []
    for e in C.labels:
        coef = C.F(a, b, c, d, e, f).conj()
        if coef:
            out.append((coef, tree.replace(tuple(position), FusionTree(FusionTree(A, B, e), Cc, d))))
    return out
