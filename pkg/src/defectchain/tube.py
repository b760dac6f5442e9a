"""Three-string annular (tube) categories over pointed fusion categories.

Geometry
--------
Three bimodule strands cross the annulus: ``M`` (an A|B bimodule) and ``N``
(a B|C bimodule) enter, ``P`` (an A|C bimodule) leaves. Read counterclockwise
they sit at 240° (``M``), 300° (``N``) and 90° (``P``), which cuts the annulus
into three sectors: the A-sector between ``P`` and ``M``, the B-sector between
``M`` and ``N`` and the C-sector between ``N`` and ``P``. A basis diagram
``D(x, y, z)`` carries one category arc in each sector::

    x : P ↔ M (left sector, label in A)
    y : M ↔ N (bottom sector, label in B)
    z : N ↔ P (right sector, label in C)

and maps inner objects ``(m, n, p)`` to outer objects
``(x ▷ m ◁ y, y ▷ n ◁ z, x ▷ p ◁ z)``.

Normal form and reduction
-------------------------
Every strand carries a *word* of arc attachments ordered from the inner to the
outer boundary. In normal form the words are ``M: [L x][R y]``,
``N: [R z][L y]`` and ``P: [L x][R z]``. Stacking a diagram outside another
concatenates words; the result is brought back to normal form by a fixed
rewrite sequence (:func:`normalize_word`): adjacent attachments on opposite
sides are swapped with the middle associator ``C`` of the strand's bimodule,
then runs on the same side are merged with ``L`` or ``R``. Parallel arcs fuse
with factor one because the categories are pointed with trivial associator.

The same moves transport an external category leg attached to the outer end
of one strand across a sector arc to another strand (:func:`transfer_leg`),
which is how the mixed F-symbols of the extended category are evaluated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .bimodule import Bimodule, vec_zp_bimodule
from .fusion import STAR, FusionCategory, vec_zp
from .scalar import Scalar, sqrt2

__all__ = ['AnnularCategory', 'AnnularDiagram', 'TubeAlgebra', 'TubeError', 'compose', 'normalize_word',
           'object_classes', 'endomorphism_algebra', 'primitive_idempotents', 'vertex_basis',
           'transfer_leg', 'derive_extended_fsymbols', 'four_string_covariance', 'defect_setup']


class TubeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# strand words


def _mul(cat: FusionCategory, a, b):
    return cat.fuse(a, b)[0]


def normalize_word(module: Bimodule, obj, events: Sequence[tuple[str, object]], left_first: bool):
    """Bring a strand word to normal form.

    Parameters
    ----------
    module : Bimodule
        The bimodule the strand is labelled by.
    obj : object
        Object of ``module`` at the inner end of the word.
    events : sequence of ``(side, label)``
        Attachments from inner to outer; ``side`` is ``'L'`` (left action) or ``'R'``.
    left_first : bool
        Target order: all left attachments inside all right ones, or the reverse.

    Returns
    -------
    phase : Scalar
        ``word = phase · normal form``.
    left, right : labels
        The merged left and right labels (category units if a side is empty).
    """
    A, B = module.left_cat, module.right_cat
    phase = Scalar.one(module.order)
    ev = list(events)

    def obj_below(k):
        m = obj
        for side, lab in ev[:k]:
            m = module.act_left(lab, m) if side == 'L' else module.act_right(m, lab)
        return m

    want_first = 'L' if left_first else 'R'
    changed = True
    while changed:  # bubble sort: deterministic, innermost violation first
        changed = False
        for k in range(len(ev) - 1):
            (s1, l1), (s2, l2) = ev[k], ev[k + 1]
            if s1 != s2 and s2 == want_first:
                m = obj_below(k)
                if s1 == 'R':
                    # a ▷ (m ◁ b) = C(a, m, b)^{-1} (a ▷ m) ◁ b
                    phase = phase * module.Cphase(l2, m, l1).inverse()
                else:
                    # (a ▷ m) ◁ b = C(a, m, b) a ▷ (m ◁ b)
                    phase = phase * module.Cphase(l1, m, l2)
                ev[k], ev[k + 1] = ev[k + 1], ev[k]
                changed = True
                break
    lefts = [lab for side, lab in ev if side == 'L']
    rights = [lab for side, lab in ev if side == 'R']
    # merge left run: a2 ▷ (a1 ▷ m) = L(a2, a1, m) (a2 a1) ▷ m
    m_in = obj if left_first else obj_below(len(rights))
    acc = A.unit
    for k, a in enumerate(lefts):
        if k:
            phase = phase * module.Lphase(a, acc, m_in)
        acc = _mul(A, a, acc)
    left_total = acc
    # merge right run: (m ◁ b1) ◁ b2 = R(m, b1, b2) m ◁ (b1 b2)
    r_in = module.act_left(left_total, obj) if left_first else obj
    acc = B.unit
    for k, b in enumerate(rights):
        if k:
            phase = phase * module.Rphase(r_in, acc, b)
        acc = _mul(B, acc, b)
    return phase, left_total, acc


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class AnnularDiagram:
    """Basis diagram ``coefficient · D(x, y, z)`` from ``inner`` to ``outer`` objects."""
    inner: tuple
    arcs: tuple
    coefficient: Scalar
    category: 'AnnularCategory' = field(compare=False, repr=False)

    @property
    def outer(self) -> tuple:
        return self.category.outer(self.inner, self.arcs)

    def scaled(self, c) -> 'AnnularDiagram':
        return AnnularDiagram(self.inner, self.arcs, self.coefficient * c, self.category)


class AnnularCategory:
    """The three-string annular category for bimodules ``M`` (A|B), ``N`` (B|C), ``P`` (A|C)."""

    def __init__(self, M: Bimodule, N: Bimodule, P: Bimodule):
        if not (M.left_cat.same_data(P.left_cat) and M.right_cat.same_data(N.left_cat)
                and N.right_cat.same_data(P.right_cat)):
            raise TubeError("bimodules are not compatible (need M: A|B, N: B|C, P: A|C)")
        self.M, self.N, self.P = M, N, P
        self.A, self.B, self.C = M.left_cat, M.right_cat, N.right_cat
        for cat in (self.A, self.B, self.C):
            if any(v != 1 for v in cat.fsymbols.values()):
                raise NotImplementedError("annular reduction implemented for trivial-associator pointed categories")
        self.order = M.order

    # label bookkeeping
    def outer(self, inner, arcs):
        (m, n, p), (x, y, z) = inner, arcs
        M, N, P = self.M, self.N, self.P
        return (M.act_right(M.act_left(x, m), y), N.act_right(N.act_left(y, n), z),
                P.act_right(P.act_left(x, p), z))

    def triples(self):
        return list(itertools.product(self.M.objects, self.N.objects, self.P.objects))

    def all_arcs(self):
        return list(itertools.product(self.A.labels, self.B.labels, self.C.labels))

    def diagram(self, inner, arcs, coefficient=1) -> AnnularDiagram:
        c = coefficient if isinstance(coefficient, Scalar) else Scalar.from_rational(coefficient, self.order)
        return AnnularDiagram(tuple(inner), tuple(arcs), c, self)

    def identity(self, inner) -> AnnularDiagram:
        return self.diagram(inner, (self.A.unit, self.B.unit, self.C.unit))

    def hom_basis(self, inner, outer) -> list[tuple]:
        """Arc triples of all basis diagrams ``inner → outer`` (lexicographic order)."""
        return [arcs for arcs in self.all_arcs() if self.outer(inner, arcs) == tuple(outer)]

    def stack(self, inner, arcs_in, arcs_out):
        """Reduce ``D(arcs_out) ∘ D(arcs_in)`` (``arcs_out`` drawn outside): returns ``(phase, arcs)``."""
        (m, n, p), (x1, y1, z1), (x2, y2, z2) = inner, arcs_in, arcs_out
        ph_m, x_m, y_m = normalize_word(self.M, m, [('L', x1), ('R', y1), ('L', x2), ('R', y2)], True)
        ph_n, y_n, z_n = normalize_word(self.N, n, [('R', z1), ('L', y1), ('R', z2), ('L', y2)], False)
        ph_p, x_p, z_p = normalize_word(self.P, p, [('L', x1), ('R', z1), ('L', x2), ('R', z2)], True)
        if x_m != x_p or y_m != y_n or z_n != z_p:
            raise TubeError("arc labels disagree between strands after normalization")
        return ph_m * ph_n * ph_p, (x_m, y_m, z_p)

    def compose(self, D1: AnnularDiagram, D2: AnnularDiagram) -> list[AnnularDiagram]:
        """``D2 ∘ D1`` with ``D2`` drawn outside ``D1``; returns the normal-form expansion."""
        if D1.outer != D2.inner:
            raise TubeError(f"cannot compose: outer {D1.outer} of inner diagram != inner {D2.inner}")
        phase, arcs = self.stack(D1.inner, D1.arcs, D2.arcs)
        coef = D1.coefficient * D2.coefficient * phase
        return [self.diagram(D1.inner, arcs, coef)] if coef else []

    # --- linear combinations: dict arcs -> Scalar, all with the same inner objects
    def compose_vectors(self, inner, inner_vec: dict, outer_vec: dict, mid=None) -> dict:
        """Bilinear extension of :meth:`compose` to ``{arcs: coefficient}`` dictionaries."""
        out: dict = {}
        for a1, c1 in inner_vec.items():
            mid1 = self.outer(inner, a1)
            if mid is not None and mid1 != mid:
                raise TubeError("inner vector does not end at a single object triple")
            for a2, c2 in outer_vec.items():
                phase, arcs = self.stack(inner, a1, a2)
                out[arcs] = out.get(arcs, Scalar(self.order)) + c1 * c2 * phase
        return {k: v for k, v in out.items() if v}

    def object_classes(self) -> list[tuple[tuple, list[tuple]]]:
        """Orbits of object triples under the annular action, with lexicographically smallest representatives."""
        idx = lambda t: (self.M.objects.index(t[0]), self.N.objects.index(t[1]), self.P.objects.index(t[2]))
        seen, classes = set(), []
        for t in sorted(self.triples(), key=idx):
            if t in seen:
                continue
            orbit, stack = {t}, [t]
            while stack:
                s = stack.pop()
                for arcs in self.all_arcs():
                    u = self.outer(s, arcs)
                    if u not in orbit:
                        orbit.add(u)
                        stack.append(u)
            seen |= orbit
            members = sorted(orbit, key=idx)
            classes.append((members[0], members))
        return classes


def compose(D1: AnnularDiagram, D2: AnnularDiagram) -> list[AnnularDiagram]:
    """``D2 ∘ D1`` (``D2`` drawn outside ``D1``) as a list of normal-form diagrams."""
    if D1.category is not D2.category:
        raise TubeError("diagrams belong to different annular categories")
    return D1.category.compose(D1, D2)


def object_classes(catA, catB, catC, M: Bimodule, N: Bimodule, P: Bimodule):
    """Isomorphism classes of object triples; see :meth:`AnnularCategory.object_classes`."""
    ann = AnnularCategory(M, N, P)
    for given, actual in ((catA, ann.A), (catB, ann.B), (catC, ann.C)):
        if given is not None and not given.same_data(actual):
            raise TubeError("categories do not match the bimodules")
    return ann.object_classes()


# ---------------------------------------------------------------------------
# exact linear algebra over Scalar


def _zero(order):
    return Scalar(order)


def _rref(rows: list[list[Scalar]], order: int):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _nullspace(mat: list[list[Scalar]], ncols: int, order: int) -> list[list[Scalar]]:
    """Exact basis of ``{u : mat · u = 0}``."""
    if not mat:
        return [[Scalar.one(order) if i == j else _zero(order) for i in range(ncols)] for j in range(ncols)]
    rows, pivots = _rref(mat, order)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        u = [_zero(order)] * ncols
        u[f] = Scalar.one(order)
        for i, pc in enumerate(pivots):
            u[pc] = -rows[i][f]
        basis.append(u)
    return basis


def _rank(vectors: list[list[Scalar]], order: int) -> int:
    if not vectors:
        return 0
    return len(_rref(vectors, order)[1])


# ---------------------------------------------------------------------------
# endomorphism algebras


class TubeAlgebra:
    """Endomorphism algebra of an object triple in an annular category.

    Elements are tuples of scalars over :attr:`basis` (a list of arc triples).
    The product ``u * v`` is the diagram of ``u`` drawn outside ``v``.
    """

    def __init__(self, ann: AnnularCategory, rep: tuple):
        self.category = ann
        self.object_class = tuple(rep)
        self.order = ann.order
        self.basis = ann.hom_basis(rep, rep)
        self.dim = len(self.basis)
        index = {a: i for i, a in enumerate(self.basis)}
        self.structure_constants = {}
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                vec = [_zero(self.order)] * self.dim
                phase, arcs = ann.stack(rep, b, a)  # a outside b
                vec[index[arcs]] = phase
                self.structure_constants[(i, j)] = tuple(vec)

    def diagrams(self) -> list[AnnularDiagram]:
        return [self.category.diagram(self.object_class, a) for a in self.basis]

    def element(self, coeffs: dict) -> tuple:
        """Algebra element from ``{arcs: coefficient}``."""
        out = [_zero(self.order)] * self.dim
        for arcs, c in coeffs.items():
            c = c if isinstance(c, Scalar) else Scalar.from_rational(c, self.order)
            out[self.basis.index(tuple(arcs))] = out[self.basis.index(tuple(arcs))] + c
        return tuple(out)

    def basis_element(self, i: int) -> tuple:
        return tuple(Scalar.one(self.order) if j == i else _zero(self.order) for j in range(self.dim))

    def identity(self) -> tuple:
        unit = (self.category.A.unit, self.category.B.unit, self.category.C.unit)
        return self.basis_element(self.basis.index(unit))

    def mul(self, u, v) -> tuple:
        out = [_zero(self.order)] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(self.structure_constants[(i, j)]):
                    if c:
                        out[k] = out[k] + ab * c
        return tuple(out)

    def add(self, u, v) -> tuple:
        return tuple(a + b for a, b in zip(u, v))

    def scale(self, u, c) -> tuple:
        return tuple(a * c for a in u)

    def is_zero(self, u) -> bool:
        return not any(u)

    def is_commutative(self) -> bool:
        return all(self.structure_constants[(i, j)] == self.structure_constants[(j, i)]
                   for i in range(self.dim) for j in range(i))

    def is_associative(self) -> bool:
        e = [self.basis_element(i) for i in range(self.dim)]
        return all(self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
                   for a in e for b in e for c in e)

    def is_unital(self) -> bool:
        try:
            one = self.identity()
        except ValueError:
            return False
        return all(self.mul(one, self.basis_element(i)) == self.basis_element(i)
                   == self.mul(self.basis_element(i), one) for i in range(self.dim))

    def left_matrix(self, u) -> list[list[Scalar]]:
        """Matrix of ``v ↦ u v`` in the diagram basis (rows = output coordinates)."""
        cols = [self.mul(u, self.basis_element(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def dagger(self, u) -> tuple:
        """Adjoint: reflect every diagram and conjugate, normalized so basis diagrams are unitary."""
        out = [_zero(self.order)] * self.dim
        one = self.identity()
        unit_idx = one.index(Scalar.one(self.order))
        for i, c in enumerate(u):
            if not c:
                continue
            # the inverse diagram is the unique basis element whose product with e_i hits the identity
            for j in range(self.dim):
                w = self.structure_constants[(i, j)][unit_idx]
                if w:
                    out[j] = out[j] + c.conj() * w.conj()
                    break
        return tuple(out)

    def to_json(self) -> dict:
        return {
            'object_class': list(self.object_class),
            'basis': [list(a) for a in self.basis],
            'algebra_dim': self.dim,
            'commutative': self.is_commutative(),
        }


def endomorphism_algebra(rep, M: Bimodule | None = None, N: Bimodule | None = None, P: Bimodule | None = None,
                         category: AnnularCategory | None = None) -> TubeAlgebra:
    """The tube algebra ``End(rep)`` of an object-class representative."""
    ann = category if category is not None else AnnularCategory(M, N, P)
    return TubeAlgebra(ann, rep)


def _roots_of_unity(order: int) -> list[Scalar]:
    n = order if order % 2 == 0 else 2 * order
    if n != order:
        raise TubeError("cyclotomic order must be even")
    return [Scalar.zeta(k, order) for k in range(n)]


def primitive_idempotents(A: TubeAlgebra) -> list[dict]:
    """Complete set of orthogonal primitive idempotents of a commutative split semisimple tube algebra.

    The joint eigenspaces of the left-multiplication operators of all basis
    diagrams are computed exactly; in a commutative monomial algebra every
    eigenvalue is a root of unity of the coefficient field. In the regular
    representation each joint eigenline is spanned by the corresponding
    primitive idempotent, which is then normalized by ``e² = e``.

    Returns a list of ``{'idempotent': element, 'character': [χ(D_i)...], 'block_dim': 1}``
    sorted by character.
    """
    if not A.is_unital():
        raise TubeError("algebra has no two-sided identity")
    if not A.is_associative():
        raise TubeError("algebra is not associative")
    if not A.is_commutative():
        raise NotImplementedError("idempotents are computed by characters; algebra is not commutative")
    order = A.order
    roots = _roots_of_unity(order)
    spaces = [[list(A.basis_element(i)) for i in range(A.dim)]]  # list of spanning sets
    for i in range(A.dim):
        Li = A.left_matrix(A.basis_element(i))
        new = []
        for W in spaces:
            r = len(W)
            found = 0
            for lam in roots:
                # solve (L_i - lam) W u = 0
                LW = [[sum((Li[row][k] * W[col][k] for k in range(A.dim)), _zero(order))
                       - lam * W[col][row] for col in range(r)] for row in range(A.dim)]
                null = _nullspace(LW, r, order)
                if null:
                    vecs = [[sum((u[c] * W[c][k] for c in range(r)), _zero(order)) for k in range(A.dim)]
                            for u in null]
                    new.append(vecs)
                    found += len(vecs)
            if found != r:
                raise TubeError("algebra does not split over the coefficient field")
        spaces = new
    out = []
    for W in spaces:
        if len(W) != 1:
            raise TubeError("joint eigenspace of dimension > 1: algebra is not semisimple")
        w = tuple(W[0])
        w2 = A.mul(w, w)
        k = next(j for j in range(A.dim) if w[j])
        if not w2[k]:
            raise TubeError("nilpotent eigenvector: algebra is not semisimple")
        c = w2[k] / w[k]
        e = A.scale(w, c.inverse())
        chars = []
        for i in range(A.dim):
            prod = A.mul(A.basis_element(i), e)
            chars.append(prod[k] / e[k])
        out.append({'idempotent': e, 'character': chars, 'block_dim': 1})

    def key(item):
        return tuple(next(j for j, r in enumerate(roots) if r == ch) for ch in item['character'])
    out.sort(key=key)
    return out


def vertex_basis(A: TubeAlgebra, idempotent, target) -> list[dict]:
    """Basis of the morphism space ``Hom(rep → target)·e`` obtained by putting annuli outside ``e``.

    ``target`` is either a full outer object triple or a single label of the outgoing
    strand (the incoming objects are then kept fixed). Candidates ``D(x,y,z) ∘ e``
    are scanned in lexicographic order and kept greedily when linearly independent.
    Returns ``[{'arcs': candidate arcs, 'vector': {arcs: coefficient}}]``.
    """
    ann = A.category
    rep = A.object_class
    outer = tuple(target) if isinstance(target, tuple) else (rep[0], rep[1], target)
    e = {arcs: c for arcs, c in zip(A.basis, idempotent) if c}
    hom = ann.hom_basis(rep, outer)
    mids = {arcs for arcs in ann.all_arcs() if ann.outer(rep, arcs) == outer}
    chosen, rows = [], []
    for arcs in sorted(mids):
        vec = ann.compose_vectors(rep, e, {arcs: Scalar.one(ann.order)}, mid=rep)
        if not vec:
            continue
        row = [vec.get(h, _zero(ann.order)) for h in hom]
        if _rank(rows + [row], ann.order) > len(rows):
            rows.append(row)
            chosen.append({'arcs': arcs, 'vector': vec})
    return chosen


def candidate_rank(A: TubeAlgebra, idempotent, target) -> tuple[int, int]:
    """``(number of candidates, rank)`` of all outer-annulus images of an idempotent."""
    ann = A.category
    rep = A.object_class
    outer = tuple(target) if isinstance(target, tuple) else (rep[0], rep[1], target)
    e = {arcs: c for arcs, c in zip(A.basis, idempotent) if c}
    hom = ann.hom_basis(rep, outer)
    rows = []
    for arcs in ann.hom_basis(rep, outer):
        vec = ann.compose_vectors(rep, e, {arcs: Scalar.one(ann.order)})
        rows.append([vec.get(h, _zero(ann.order)) for h in hom])
    return len(rows), _rank(rows, ann.order)


# ---------------------------------------------------------------------------
# external legs and the extended F-symbols


_TRANSFERS = {
    # (source strand, side) -> (target strand, side, sector arc index)
    ('P', 'R'): ('N', 'R', 2),
    ('P', 'L'): ('M', 'L', 0),
    ('M', 'R'): ('N', 'L', 1),
}


def transfer_leg(ann: AnnularCategory, inner, vec: dict, leg, source: tuple[str, str]) -> tuple[dict, tuple]:
    """Move an external category leg from the outer end of one strand to another.

    The leg, attached outermost on ``source = (strand, side)``, is slid to the
    sector arc on that side, merged into it (the arc label absorbs the leg), and
    re-emitted outermost on the strand at the other end of the arc. Every move is
    an associator of the strand's bimodule.

    Returns the new ``{arcs: coefficient}`` vector (leg now on the target strand) and the
    target ``(strand, side)``.
    """
    if source not in _TRANSFERS:
        raise TubeError(f"unsupported leg transfer from {source}")
    tgt_strand, tgt_side, k = _TRANSFERS[source]
    mods = {'M': ann.M, 'N': ann.N, 'P': ann.P}
    pattern = {'M': ('L', 'R'), 'N': ('R', 'L'), 'P': ('L', 'R')}
    sector = {'M': {'L': 0, 'R': 1}, 'N': {'R': 2, 'L': 1}, 'P': {'L': 0, 'R': 2}}
    out: dict = {}
    for arcs, coef in vec.items():
        objs = dict(zip('MNP', inner))
        phase = Scalar.one(ann.order)
        # source strand: word + leg, bring the leg next to the arc end and merge
        s_strand, s_side = source
        mod = mods[s_strand]
        word = [(side, arcs[sector[s_strand][side]]) for side in pattern[s_strand]]
        pos = [i for i, (side, _) in enumerate(word) if side == s_side][0]
        word.append((s_side, leg))
        m = objs[s_strand]
        for i in range(len(word) - 1, pos + 1, -1):
            (s1, l1), (_, l2) = word[i - 1], word[i]
            below = m
            for side, lab in word[:i - 1]:
                below = mod.act_left(lab, below) if side == 'L' else mod.act_right(below, lab)
            if s1 == 'R':
                phase = phase * mod.Cphase(l2, below, l1).inverse()
            else:
                phase = phase * mod.Cphase(l1, below, l2)
            word[i - 1], word[i] = word[i], word[i - 1]
        below = m
        for side, lab in word[:pos]:
            below = mod.act_left(lab, below) if side == 'L' else mod.act_right(below, lab)
        arc_label = arcs[k]
        cat = mod.left_cat if s_side == 'L' else mod.right_cat
        if s_side == 'L':
            phase = phase * mod.Lphase(leg, arc_label, below)
            new_label = _mul(cat, leg, arc_label)
        else:
            phase = phase * mod.Rphase(below, arc_label, leg)
            new_label = _mul(cat, arc_label, leg)
        # target strand: split the arc end into (old arc, leg), then slide the leg outermost
        mod = mods[tgt_strand]
        word = [(side, arcs[sector[tgt_strand][side]]) for side in pattern[tgt_strand]]
        pos = [i for i, (side, _) in enumerate(word) if side == tgt_side][0]
        below = objs[tgt_strand]
        for side, lab in word[:pos]:
            below = mod.act_left(lab, below) if side == 'L' else mod.act_right(below, lab)
        if tgt_side == 'L':
            phase = phase * mod.Lphase(leg, arc_label, below).inverse()
        else:
            phase = phase * mod.Rphase(below, arc_label, leg).inverse()
        word.insert(pos + 1, (tgt_side, leg))
        for i in range(pos + 1, len(word) - 1):
            (s1, l1), (_, l2) = word[i], word[i + 1]
            below = objs[tgt_strand]
            for side, lab in word[:i]:
                below = mod.act_left(lab, below) if side == 'L' else mod.act_right(below, lab)
            if s1 == 'R':
                phase = phase * mod.Cphase(l2, below, l1).inverse()
            else:
                phase = phase * mod.Cphase(l1, below, l2)
            word[i], word[i + 1] = word[i + 1], word[i]
        new_arcs = list(arcs)
        new_arcs[k] = new_label
        new_arcs = tuple(new_arcs)
        out[new_arcs] = out.get(new_arcs, Scalar(ann.order)) + coef * phase
    return {a: c for a, c in out.items() if c}, (tgt_strand, tgt_side)


def _ratio(vec: dict, ref: dict, order: int) -> Scalar:
    """The scalar ``λ`` with ``vec = λ · ref`` (exact; raises if not proportional)."""
    if set(vec) != set(ref):
        raise TubeError("vectors are not proportional (different supports)")
    k = next(iter(ref))
    lam = vec[k] / ref[k]
    if any(vec[a] != lam * ref[a] for a in ref):
        raise TubeError("vectors are not proportional")
    return lam


@dataclass
class DefectSetup:
    """Annular data used to build vertices ``* ⊗ * → a`` for a one-object defect bimodule."""
    category: AnnularCategory
    algebra: TubeAlgebra
    idempotent: tuple
    vertices: dict  # label a -> {arcs: coefficient}
    rep: tuple


def defect_setup(C: FusionCategory, D: Bimodule) -> DefectSetup:
    """Tube algebra of ``(D, D, regular)`` at its first object class and the vertex basis over the trivial character."""
    if len(D.objects) != 1:
        raise TubeError("defect bimodule must have a single object")
    p = len(C.labels)
    regular = vec_zp_bimodule(p, 'X', 1, order=C.order)
    ann = AnnularCategory(D, D, regular)
    rep, _ = ann.object_classes()[0]
    alg = TubeAlgebra(ann, rep)
    idems = primitive_idempotents(alg)
    trivial = next(it for it in idems if all(ch == 1 for ch in it['character']))
    e = trivial['idempotent']
    vertices = {}
    for a in C.labels:
        vb = vertex_basis(alg, e, a)
        if len(vb) != 1:
            raise TubeError(f"vertex space for label {a!r} has dimension {len(vb)} (expected 1)")
        vertices[a] = vb[0]['vector']
    return DefectSetup(ann, alg, e, vertices, rep)


def four_string_covariance(setup: DefectSetup, C: FusionCategory, D: Bimodule) -> dict:
    """Constraints on ``(F^*_{***})_{a,b}`` from the annular action on four-strand trees.

    The two bases of ``Hom(* ⊗ * ⊗ * → *)`` are
    ``|L_a⟩``: strands 1, 2 fuse through the vertex ``v_a`` and ``a`` acts from the left on strand 3;
    ``|R_b⟩``: strands 2, 3 fuse through ``v_b`` and ``b`` acts from the right on strand 1.
    Four elementary annuli act on both (``x0``: output ↔ strand 1, left side;
    ``x1``: output ↔ strand 3, right side; ``x2``: strands 1–2; ``x3``: strands 2–3).
    An F-move commutes with the action, so for every word in the generators
    ``λ_L(a) F_{a', b'} = F_{a, b} λ_R(b)``. The homogeneous system is solved exactly.

    Returns ``{'equations': int, 'nullity': int, 'ratios': {(a, b): F_ab / F_00}}``.
    """
    ann = setup.category
    rep = setup.rep
    order = ann.order
    star = D.objects[0]
    labels = C.labels
    unit = C.unit
    one = Scalar.one(order)
    v = setup.vertices

    def project(vec, a):
        return _ratio(vec, v[a], order)

    def act_L(a, gen, lab):
        """Elementary annulus on |L_a⟩: returns (λ, a')."""
        vec = v[a]
        ph = one
        if gen == 0:    # x0 slides down the output into the junction, then rides P to strand 1
            ph = D.Lphase(lab, a, star)
            vec = ann.compose_vectors(rep, vec, {(lab, unit, unit): one})
            a2 = _mul(C, lab, a)
        elif gen == 1:  # cap on the right of strand 3 around the junction
            ph = D.Cphase(a, star, lab).inverse() * D.Rphase(star, lab, C.dual(lab))
            a2 = a
        elif gen == 2:  # bottom arc of v_a
            vec = ann.compose_vectors(rep, vec, {(unit, lab, unit): one})
            a2 = a
        else:           # strand 2–3 arc merges into the junction and rides P back to strand 2
            ph = D.Lphase(a, lab, star)
            vec = ann.compose_vectors(rep, vec, {(unit, unit, lab): one})
            a2 = _mul(C, a, lab)
        return ph * project(vec, a2), a2

    def act_R(b, gen, lab):
        vec = v[b]
        ph = one
        if gen == 0:    # cap on the left of strand 1 around the junction
            ph = D.Cphase(lab, star, b) * D.Lphase(C.dual(lab), lab, star)
            b2 = b
        elif gen == 1:  # x1 slides down the output into the junction, then rides P to strand 3
            ph = D.Rphase(star, b, lab)
            vec = ann.compose_vectors(rep, vec, {(unit, unit, lab): one})
            b2 = _mul(C, b, lab)
        elif gen == 2:  # strand 1–2 arc merges into the junction and rides P to strand 2
            ph = D.Rphase(star, lab, b)
            vec = ann.compose_vectors(rep, vec, {(lab, unit, unit): one})
            b2 = _mul(C, lab, b)
        else:           # bottom arc of v_b
            vec = ann.compose_vectors(rep, vec, {(unit, lab, unit): one})
            b2 = b
        return ph * project(vec, b2), b2

    idx = {(a, b): i for i, (a, b) in enumerate(itertools.product(labels, repeat=2))}
    rows = []
    for gens in itertools.product(labels, repeat=4):
        for a, b in itertools.product(labels, repeat=2):
            lamL, a2 = one, a
            lamR, b2 = one, b
            # fixed generator order (innermost first); the same word acts on both trees
            for g in (3, 2, 1, 0):
                lab = gens[g]
                l, a2 = act_L(a2, g, lab)
                lamL = lamL * l
                r, b2 = act_R(b2, g, lab)
                lamR = lamR * r
            row = [Scalar(order)] * len(idx)
            row[idx[(a2, b2)]] = row[idx[(a2, b2)]] + lamL
            row[idx[(a, b)]] = row[idx[(a, b)]] - lamR
            rows.append(row)
    null = _nullspace(rows, len(idx), order)
    result = {'equations': len(rows), 'nullity': len(null), 'ratios': None}
    if len(null) == 1:
        u = null[0]
        base = u[idx[(unit, unit)]]
        if base:
            result['ratios'] = {k: u[i] / base for k, i in idx.items()}
    return result


def derive_extended_fsymbols(C: FusionCategory, M: Bimodule, kappa=1) -> FusionCategory:
    """Extended fusion category ``C ⊕ {*}`` generated by a one-object invertible bimodule.

    Only the validated instance ``C = Vec(Z/2Z)``, ``M = F_1`` is accepted. The table is
    computed, not looked up:

    * category-only symbols come from ``C``;
    * symbols with a single ``*`` are the bimodule associators
      (``F_{ab*} = L^{-1}``, ``F_{a*b} = C``, ``F_{*ab} = R``);
    * symbols with two ``*`` are evaluated by transporting a category leg through
      the tube-algebra vertex ``v_a`` (:func:`transfer_leg`);
    * ``(F^*_{***})_{a,b}`` is fixed up to one scalar by :func:`four_string_covariance`,
      and the scalar by ``(F^*_{***})_{0,0} = kappa / d_*`` with ``d_*² = Σ_{c ∈ *⊗*} d_c``.
    """
    if kappa not in (1, -1):
        raise TubeError("kappa must be +1 or -1")
    if not (C.same_data(vec_zp(2, C.order)) and len(M.objects) == 1
            and M.C.get((1, M.objects[0], 1)) == -1):
        raise TubeError("unsupported input: only Vec(Z/2Z) with the F1 bimodule is supported")
    order = C.order
    star_obj = M.objects[0]
    S = STAR
    setup = defect_setup(C, M)
    ann, rep, v = setup.category, setup.rep, setup.vertices
    one = Scalar.one(order)
    labels = C.labels
    fs = {}
    # category-only
    for key, val in C.fsymbols.items():
        fs[key] = val
    # one defect label: bimodule associators
    for a, b in itertools.product(labels, repeat=2):
        ab = _mul(C, a, b)
        fs[(a, b, S, S, ab, S)] = M.Lphase(a, b, star_obj).inverse()
        fs[(a, S, b, S, S, S)] = M.Cphase(a, star_obj, b)
        fs[(S, a, b, S, S, ab)] = M.Rphase(star_obj, a, b)
    # two defect labels: leg transport through the vertex
    for a, b in itertools.product(labels, repeat=2):
        ab = _mul(C, a, b)
        # ((**)_b a) = F · (*(*a)_*): leg a on P (right) moved to N
        moved, _ = transfer_leg(ann, rep, v[b], a, ('P', 'R'))
        fs[(S, S, a, _mul(C, b, a), b, S)] = _ratio(moved, v[_mul(C, b, a)], order)
        # ((a*)_* *) = F · (a(**)_b): leg a on P (left) moved to M gives the inverse relation
        moved, _ = transfer_leg(ann, rep, v[b], a, ('P', 'L'))
        fs[(a, S, S, ab, S, b)] = _ratio(moved, v[ab], order).inverse()
        # ((*a)_* *)_b = F · (*(a*)_*)_b: leg a on M (right) moved to N (left)
        moved, _ = transfer_leg(ann, rep, v[b], a, ('M', 'R'))
        fs[(S, a, S, b, S, S)] = _ratio(moved, v[b], order)
    # three defect labels: covariance up to a scalar, then normalization
    cov = four_string_covariance(setup, C, M)
    if cov['nullity'] != 1 or cov['ratios'] is None:
        raise TubeError(f"inconsistent four-string covariance (nullity {cov['nullity']})")
    d_star_sq = sum((one for _ in labels), Scalar(order))  # Σ_{c ∈ *⊗*} d_c with d_c = 1
    d_star = sqrt2(order)
    if d_star * d_star != d_star_sq:
        raise TubeError("defect dimension is not √2")
    f00 = one * kappa / d_star
    for (a, b), r in cov['ratios'].items():
        fs[(S, S, S, S, a, b)] = r * f00
    fusion = {}
    for a in labels:
        for b in labels:
            fusion[(a, b)] = C.fuse(a, b)
        fusion[(a, S)] = (S,)
        fusion[(S, a)] = (S,)
    fusion[(S, S)] = tuple(labels)
    qdim = dict(C.qdim)
    qdim[S] = d_star
    return FusionCategory(tuple(labels) + (S,), C.unit, fusion, qdim, fs,
                          name=f'derived(kappa={kappa:+d})', order=order)
