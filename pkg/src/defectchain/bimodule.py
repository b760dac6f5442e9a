"""Bimodule categories over pointed fusion categories, and the Vec(Z/pZ) catalog.

All bimodules in scope have one-dimensional morphism spaces, so the three
associators are scalar-valued functions of the labels involved:

``L[a, b, m]``
    ``[a ▷ (b ▷ m)] = L · [(a⊗b) ▷ m]``
``R[m, a, b]``
    ``[(m ◁ a) ◁ b] = R · [m ◁ (a⊗b)]``
``C[a, m, b]``
    ``[(a ▷ m) ◁ b] = C · [a ▷ (m ◁ b)]``

Entries not stored explicitly are 1. The coherence identities checked by
:func:`check_module_coherence` are the pointed specializations of the module
pentagons and the two middle-associativity hexagons of a bimodule category.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .fusion import FusionCategory, vec_zp
from .scalar import DEFAULT_ORDER, Scalar, root_of_unity

__all__ = ['Bimodule', 'BimoduleError', 'vec_zp_bimodule', 'catalog', 'check_module_coherence']


class BimoduleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Bimodule:
    """A bimodule category with invertible-morphism (phase) associators.

    Parameters
    ----------
    left_cat, right_cat : FusionCategory
        Pointed categories acting from the left and from the right.
    objects : tuple
        Simple objects of the bimodule.
    left_action : mapping ``(a, m) -> m'``
    right_action : mapping ``(m, a) -> m'``
    L, R, C : mappings to :class:`Scalar`; missing entries mean 1.
    """
    left_cat: FusionCategory
    right_cat: FusionCategory
    objects: tuple
    left_action: Mapping
    right_action: Mapping
    L: Mapping = field(default_factory=dict)
    R: Mapping = field(default_factory=dict)
    C: Mapping = field(default_factory=dict)
    name: str = ''

    def __post_init__(self):
        objs = tuple(self.objects)
        object.__setattr__(self, 'objects', objs)
        for cat in (self.left_cat, self.right_cat):
            if any(len(cat.fuse(a, b)) != 1 for a in cat.labels for b in cat.labels):
                raise BimoduleError("only pointed (group-like) categories are supported")
        for a in self.left_cat.labels:
            for m in objs:
                if self.left_action.get((a, m)) not in objs:
                    raise BimoduleError(f"left action undefined at ({a!r}, {m!r})")
        for m in objs:
            for a in self.right_cat.labels:
                if self.right_action.get((m, a)) not in objs:
                    raise BimoduleError(f"right action undefined at ({m!r}, {a!r})")
        for name in ('left_action', 'right_action', 'L', 'R', 'C'):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

    @property
    def order(self) -> int:
        return self.left_cat.order

    def act_left(self, a, m):
        return self.left_action[(a, m)]

    def act_right(self, m, a):
        return self.right_action[(m, a)]

    def _get(self, table, key) -> Scalar:
        v = table.get(key)
        return Scalar.one(self.order) if v is None else v

    def Lphase(self, a, b, m) -> Scalar:
        return self._get(self.L, (a, b, m))

    def Rphase(self, m, a, b) -> Scalar:
        return self._get(self.R, (m, a, b))

    def Cphase(self, a, m, b) -> Scalar:
        return self._get(self.C, (a, m, b))

    def with_entry(self, table: str, key, value) -> 'Bimodule':
        """A copy with one associator entry replaced (mutation tests)."""
        if table not in ('L', 'R', 'C'):
            raise BimoduleError(f"unknown associator table {table!r}")
        data = dict(getattr(self, table))
        data[key] = value if isinstance(value, Scalar) else Scalar.from_rational(value, self.order)
        kw = {t: dict(getattr(self, t)) for t in ('L', 'R', 'C')}
        kw[table] = data
        return Bimodule(self.left_cat, self.right_cat, self.objects, dict(self.left_action),
                        dict(self.right_action), name=self.name + '*', **kw)

    def is_invertible_action(self) -> bool:
        """Whether every ``a ▷ -`` and ``- ◁ a`` permutes the objects."""
        n = len(self.objects)
        left = all(len({self.act_left(a, m) for m in self.objects}) == n for a in self.left_cat.labels)
        right = all(len({self.act_right(m, a) for m in self.objects}) == n for a in self.right_cat.labels)
        return left and right

    # JSON
    def to_json(self) -> dict:
        enc = lambda x: list(x) if isinstance(x, tuple) else x
        return {
            'name': self.name,
            'left_category': self.left_cat.to_json(),
            'right_category': self.right_cat.to_json(),
            'objects': [enc(m) for m in self.objects],
            'left_action': [[a, enc(m), enc(n)] for (a, m), n in self.left_action.items()],
            'right_action': [[enc(m), a, enc(n)] for (m, a), n in self.right_action.items()],
            'L': [[a, b, enc(m), v.to_json()] for (a, b, m), v in self.L.items()],
            'R': [[enc(m), a, b, v.to_json()] for (m, a, b), v in self.R.items()],
            'C': [[a, enc(m), b, v.to_json()] for (a, m, b), v in self.C.items()],
        }

    @classmethod
    def from_json(cls, data) -> 'Bimodule':
        dec = lambda x: tuple(x) if isinstance(x, list) else x
        A = FusionCategory.from_json(data['left_category'])
        B = FusionCategory.from_json(data['right_category'])
        sc = lambda v: Scalar.from_json(v).embed(A.order)
        return cls(A, B, tuple(dec(m) for m in data['objects']),
                   {(a, dec(m)): dec(n) for a, m, n in data['left_action']},
                   {(dec(m), a): dec(n) for m, a, n in data['right_action']},
                   L={(a, b, dec(m)): sc(v) for a, b, m, v in data.get('L', [])},
                   R={(dec(m), a, b): sc(v) for m, a, b, v in data.get('R', [])},
                   C={(a, dec(m), b): sc(v) for a, m, b, v in data.get('C', [])},
                   name=data.get('name', ''))


def _parse_name(name: str):
    name = name.strip()
    if name in ('T', 'L', 'R', 'F0'):
        return name, None
    if name in ('X', 'F'):
        return name, None
    for prefix in ('X', 'F'):
        if name.startswith(prefix) and name[len(prefix):].lstrip('_').lstrip('-').isdigit():
            return prefix, int(name[len(prefix):].lstrip('_'))
    raise BimoduleError(f"unknown bimodule {name!r}")


def vec_zp_bimodule(p: int, name: str, param: int | None = None, order: int | None = None) -> Bimodule:
    """A bimodule of the Vec(Z/pZ) catalog.

    Parameters
    ----------
    p : int
        1 or a prime.
    name : str
        ``'T'`` (regular ⊠ regular, objects ``(g, h)``), ``'L'`` (left action trivial),
        ``'R'`` (right action trivial), ``'F0'`` (one object, trivial), ``'Xk'`` (objects ``h``,
        ``a ▷ h = h + a``, ``h ◁ a = h + k a``) or ``'Fq'`` (one object ``'*'`` with
        ``C[a, *, b] = exp(2πi q a b / p)``). The parameter may be embedded in the name
        (``'X2'``, ``'F1'``) or given as ``param``.
    order : int, optional
        Cyclotomic order of the scalars; defaults to ``lcm(8, p)``.
    """
    if p < 1 or (p > 1 and any(p % d == 0 for d in range(2, math.isqrt(p) + 1))):
        raise BimoduleError("p must be 1 or a prime")
    kind, k = _parse_name(name)
    if param is not None:
        k = param
    if kind in ('X', 'F') and k is None:
        raise BimoduleError(f"{name} needs a parameter")
    order = math.lcm(DEFAULT_ORDER, p) if order is None else order
    A = vec_zp(p, order)
    G = range(p)
    la, ra, C = {}, {}, {}
    if kind == 'T':
        objs = tuple((g, h) for g in G for h in G)
        for a in G:
            for g, h in objs:
                la[(a, (g, h))] = ((g + a) % p, h)
                ra[((g, h), a)] = (g, (h + a) % p)
        label = 'T'
    elif kind in ('L', 'R', 'X'):
        objs = tuple(G)
        lk, rk = {'L': (0, 1), 'R': (1, 0)}.get(kind, (1, k))
        for a in G:
            for h in G:
                la[(a, h)] = (h + lk * a) % p
                ra[(h, a)] = (h + rk * a) % p
        label = kind if kind != 'X' else f'X{k % p}'
    else:
        q = 0 if kind == 'F0' else k % p
        objs = ('*',)
        for a in G:
            la[(a, '*')] = '*'
            ra[('*', a)] = '*'
            for b in G:
                if (q * a * b) % p:
                    C[(a, '*', b)] = root_of_unity(q * a * b, p, order)
        label = f'F{q}'
    return Bimodule(A, A, objs, la, ra, C=C, name=f'{label} over Z/{p}')


def catalog(p: int) -> dict[str, Bimodule]:
    """Every catalog bimodule for Vec(Z/pZ), keyed by name."""
    out = {n: vec_zp_bimodule(p, n) for n in ('T', 'L', 'R', 'F0')}
    for k in range(p):
        out[f'X{k}'] = vec_zp_bimodule(p, 'X', k)
        out[f'F{k}'] = vec_zp_bimodule(p, 'F', k)
    return out


def check_module_coherence(M: Bimodule) -> dict:
    """Check the bimodule coherence identities exactly.

    For all labels ``a, b, c`` and objects ``m``:

    * left pentagon ``L(a,b,c▷m) L(ab,c,m) = L(b,c,m) L(a,bc,m) F_A(a,b,c)``;
    * right pentagon ``R(m◁a,b,c) R(m,a,bc) F_B(a,b,c) = R(m,a,b) R(m,ab,c)``;
    * hexagon ``L(a,b,m) C(ab,m,c) = C(a,b▷m,c) C(b,m,c) L(a,b,m◁c)``;
    * hexagon ``R(a▷m,b,c) C(a,m,bc) = C(a,m,b) C(a,m◁b,c) R(m,b,c)``;

    plus unitarity (``|x| = 1``) of every stored entry. Returns a report with the
    violating tuples per identity.
    """
    A, B = M.left_cat, M.right_cat
    fuseA = lambda a, b: A.fuse(a, b)[0]
    fuseB = lambda a, b: B.fuse(a, b)[0]
    FA = lambda a, b, c: A.F(a, b, c, fuseA(fuseA(a, b), c), fuseA(a, b), fuseA(b, c))
    FB = lambda a, b, c: B.F(a, b, c, fuseB(fuseB(a, b), c), fuseB(a, b), fuseB(b, c))
    L, R, C = M.Lphase, M.Rphase, M.Cphase
    lt, rt = M.act_left, M.act_right
    report = {'left_pentagon': [], 'right_pentagon': [], 'middle_left': [], 'middle_right': [],
              'unitarity': []}
    for m in M.objects:
        for a, b, c in itertools.product(A.labels, repeat=3):
            if L(a, b, lt(c, m)) * L(fuseA(a, b), c, m) != L(b, c, m) * L(a, fuseA(b, c), m) * FA(a, b, c):
                report['left_pentagon'].append((a, b, c, m))
        for a, b, c in itertools.product(B.labels, repeat=3):
            if R(rt(m, a), b, c) * R(m, a, fuseB(b, c)) * FB(a, b, c) != R(m, a, b) * R(m, fuseB(a, b), c):
                report['right_pentagon'].append((m, a, b, c))
        for a, b in itertools.product(A.labels, repeat=2):
            for c in B.labels:
                if L(a, b, m) * C(fuseA(a, b), m, c) != C(a, lt(b, m), c) * C(b, m, c) * L(a, b, rt(m, c)):
                    report['middle_left'].append((a, b, m, c))
        for a in A.labels:
            for b, c in itertools.product(B.labels, repeat=2):
                if R(lt(a, m), b, c) * C(a, m, fuseB(b, c)) != C(a, m, b) * C(a, rt(m, b), c) * R(m, b, c):
                    report['middle_right'].append((a, m, b, c))
    for tname in ('L', 'R', 'C'):
        for key, v in getattr(M, tname).items():
            if v * v.conj() != 1:
                report['unitarity'].append((tname,) + tuple(key))
    report['ok'] = not any(report[k] for k in list(report))
    return report
