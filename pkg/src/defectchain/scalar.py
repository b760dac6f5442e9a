"""Exact arithmetic in cyclotomic fields :math:`\\mathbb{Q}(\\zeta_n)`.

Elements are stored in the power basis ``1, ζ, ζ², …, ζ^{φ(n)-1}`` with
rational coefficients and reduced modulo the ``n``-th cyclotomic polynomial
after every multiplication, so equality is exact and decidable.

Mixing scalars of different order is an error; embed both operands into a
common field first with :meth:`Scalar.embed` (or :func:`common_order`).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = ['Scalar', 'ScalarError', 'cyclotomic_polynomial', 'sqrt2', 'root_of_unity', 'common_order',
           'DEFAULT_ORDER']

DEFAULT_ORDER = 8


class ScalarError(ArithmeticError):
    """Raised on order mismatch or division by zero."""


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Divide integer polynomials (low degree first); ``den`` must be monic."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    rem = num[:len(den) - 1]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Φ_n, lowest degree first."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Integer coordinates of ζ^k for k = 0 … n-1 in the power basis of Q(ζ_n)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by ζ and reduce with the monic relation ζ^deg = -Σ phi_j ζ^j
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[j] for j, c in enumerate(cur)]
    return tuple(rows)


@lru_cache(maxsize=None)
def _degree(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _reduce(n: int, long) -> list[int]:
    """Reduce integer coefficients of powers of ζ (any length) to the power basis."""
    table = _power_table(n)
    deg = _degree(n)
    out = list(long[:deg]) + [0] * max(0, deg - len(long))
    for k in range(deg, len(long)):
        c = long[k]
        if c:
            for j, r in enumerate(table[k % n]):
                if r:
                    out[j] += c * r
    return out


def _normalize(nums, den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums, den = [-x for x in nums], -den
    g = den
    for x in nums:
        if x:
            g = math.gcd(g, x)
            if g == 1:
                break
    if g != 1:
        nums, den = [x // g for x in nums], den // g
    if not any(nums):
        den = 1
    return tuple(nums), den


class Scalar:
    """An element of the cyclotomic field Q(ζ_n).

    Parameters
    ----------
    order : int
        The cyclotomic order ``n``.
    coeffs : sequence of rationals
        Coordinates in the power basis; sequences longer than φ(n) are reduced.

    Notes
    -----
    Plain integers and :class:`fractions.Fraction` are promoted automatically in
    arithmetic with a scalar. Instances are immutable and hashable. Internally the
    coordinates are integers over one common positive denominator.
    """

    __slots__ = ('order', '_num', '_den', '_hash')

    def __init__(self, order: int = DEFAULT_ORDER, coeffs=()):
        deg = _degree(order)
        cs = [Fraction(c) for c in coeffs]
        den = 1
        for c in cs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in cs]
        if len(nums) > deg:
            nums = _reduce(order, nums)
        nums += [0] * (deg - len(nums))
        self._set(order, *_normalize(nums, den))

    def _set(self, order, num, den):
        object.__setattr__(self, 'order', order)
        object.__setattr__(self, '_num', num)
        object.__setattr__(self, '_den', den)
        object.__setattr__(self, '_hash', None)

    @classmethod
    def _raw(cls, order: int, nums, den: int = 1) -> 'Scalar':
        obj = object.__new__(cls)
        obj._set(order, *_normalize(nums, den))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Power-basis coordinates as fractions."""
        return tuple(Fraction(x, self._den) for x in self._num)

    # construction helpers
    @classmethod
    def from_rational(cls, value, order: int = DEFAULT_ORDER) -> 'Scalar':
        v = Fraction(value)
        return cls._raw(order, [v.numerator] + [0] * (_degree(order) - 1), v.denominator)

    @staticmethod
    def one(order: int = DEFAULT_ORDER) -> 'Scalar':
        """The (shared, cached) multiplicative identity of Q(ζ_order)."""
        return _one(order)

    @classmethod
    def zeta(cls, k: int = 1, order: int = DEFAULT_ORDER) -> 'Scalar':
        """ζ_n^k."""
        return cls._raw(order, _power_table(order)[k % order])

    def _coerce(self, other) -> 'Scalar':
        if isinstance(other, Scalar):
            if other.order != self.order:
                raise ScalarError(f"order mismatch: {self.order} vs {other.order}; embed first")
            return other
        if isinstance(other, (int, Rational)):
            return Scalar.from_rational(other, self.order)
        return NotImplemented

    # ring operations
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        da, db = self._den, o._den
        if da == db:
            return Scalar._raw(self.order, [a + b for a, b in zip(self._num, o._num)], da)
        return Scalar._raw(self.order, [a * db + b * da for a, b in zip(self._num, o._num)], da * db)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.order, [-a for a in self._num], self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is _one(self.order):
            return self
        if self is _one(self.order):
            return o
        a, b = self._num, o._num
        den = self._den * o._den
        # fast paths: multiplication by a rational number needs no reduction
        if not any(b[1:]):
            c = b[0]
            return Scalar._raw(self.order, [x * c for x in a], den)
        if not any(a[1:]):
            c = a[0]
            return Scalar._raw(self.order, [x * c for x in b], den)
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Scalar._raw(self.order, _reduce(self.order, prod), den)

    __rmul__ = __mul__

    def inverse(self) -> 'Scalar':
        """Multiplicative inverse, computed by solving the multiplication-matrix system exactly."""
        if self.is_zero():
            raise ScalarError("division by zero")
        if self.is_rational():
            return Scalar._raw(self.order, [self._den] + [0] * (len(self._num) - 1), self._num[0])
        deg = len(self._num)
        basis = _power_table(self.order)
        cols = [(self * Scalar._raw(self.order, basis[j])).coeffs for j in range(deg)]
        mat = [[cols[j][i] for j in range(deg)] + [Fraction(int(i == 0))] for i in range(deg)]
        for c in range(deg):
            piv = next(r for r in range(c, deg) if mat[r][c] != 0)
            mat[c], mat[piv] = mat[piv], mat[c]
            pv = mat[c][c]
            mat[c] = [v / pv for v in mat[c]]
            for r in range(deg):
                if r != c and mat[r][c] != 0:
                    f = mat[r][c]
                    mat[r] = [v - f * w for v, w in zip(mat[r], mat[c])]
        return Scalar(self.order, [mat[i][deg] for i in range(deg)])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = Scalar.from_rational(1, self.order)
        for _ in range(abs(k)):
            result = result * base
        return result

    def conj(self) -> 'Scalar':
        """Complex conjugate (ζ ↦ ζ⁻¹)."""
        n = self.order
        long = [0] * n
        for k, c in enumerate(self._num):
            long[(-k) % n] += c
        return Scalar._raw(n, _reduce(n, long), self._den)

    conjugate = conj

    def embed(self, order: int) -> 'Scalar':
        """The same number viewed in Q(ζ_order); requires ``self.order`` to divide ``order``."""
        if order % self.order:
            raise ScalarError(f"cannot embed order {self.order} into order {order}")
        if order == self.order:
            return self
        step = order // self.order
        long = [0] * order
        for k, c in enumerate(self._num):
            long[k * step] += c
        return Scalar._raw(order, _reduce(order, long), self._den)

    # comparison and conversion
    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.order != self.order:
                m = math.lcm(self.order, other.order)
                a, b = self.embed(m), other.embed(m)
                return a._num == b._num and a._den == b._den
            return self._num == other._num and self._den == other._den
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            # rationals hash like Fractions so that Scalar(1) and 1 collide as required
            h = (hash(Fraction(self._num[0], self._den)) if self.is_rational()
                 else hash((self.order, self._num, self._den)))
            object.__setattr__(self, '_hash', h)
        return h

    def __bool__(self):
        return not self.is_zero()

    def to_complex(self) -> complex:
        """Value under the standard embedding ζ_n ↦ exp(2πi/n).

        The error is below ``2**-50 * (1 + |a|)``: a double-precision sum is used unless
        the coefficients are large compared to the result (cancellation), in which case
        the sum is re-evaluated with 40 significant digits.
        """
        n = self.order
        re, im = [], []
        weight = 0
        for k, c in enumerate(self._num):
            if c:
                w = _unit_root(n, k)
                re.append(c * w.real)
                im.append(c * w.imag)
                weight += abs(c)
        z = complex(math.fsum(re) / self._den, math.fsum(im) / self._den)
        if weight / self._den > 64 * (1 + abs(z)):
            import mpmath
            with mpmath.workdps(40):
                acc = mpmath.mpc(0)
                for k, c in enumerate(self._num):
                    if c:
                        acc += c * mpmath.expjpi(mpmath.mpf(2 * k) / n)
                acc /= self._den
                z = complex(acc)
        return z

    to_float = to_complex

    def __complex__(self):
        return self.to_complex()

    def __float__(self):
        z = self.to_complex()
        if abs(z.imag) > 1e-12 * (1 + abs(z)):
            raise ScalarError("scalar is not real")
        return z.real

    def __repr__(self):
        return f"Scalar({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.order}^{k}")
        return " + ".join(terms) if terms else "0"

    # serialization
    def to_json(self) -> dict:
        return {'order': self.order, 'coeffs': [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> 'Scalar':
        return cls(int(data['order']), [Fraction(int(n), int(d)) for n, d in data['coeffs']])


@lru_cache(maxsize=None)
def _one(order: int) -> Scalar:
    return Scalar.from_rational(1, order)


@lru_cache(maxsize=None)
def _unit_root(n: int, k: int) -> complex:
    """exp(2πik/n), evaluated by octant symmetry so that mirror-image roots agree bit for bit."""
    f = Fraction(k % n, n)
    sin_sign = 1
    if f > Fraction(1, 2):
        f, sin_sign = 1 - f, -1
    cos_sign = 1
    if f > Fraction(1, 4):
        f, cos_sign = Fraction(1, 2) - f, -1
    if f > Fraction(1, 8):
        g = 2 * math.pi * float(Fraction(1, 4) - f)
        c, s = math.sin(g), math.cos(g)
    else:
        g = 2 * math.pi * float(f)
        c, s = math.cos(g), math.sin(g)
    return complex(cos_sign * c, sin_sign * s)


def root_of_unity(k: int, n: int, order: int | None = None) -> Scalar:
    """exp(2πi k/n) as a scalar of cyclotomic order ``order`` (default ``n``)."""
    order = n if order is None else order
    if order % n:
        raise ScalarError(f"{n}-th roots of unity do not live in Q(ζ_{order})")
    return Scalar.zeta(k * (order // n), order)


def sqrt2(order: int = DEFAULT_ORDER) -> Scalar:
    """√2 = ζ₈ + ζ₈⁻¹, embedded into Q(ζ_order) (``order`` must be a multiple of 8)."""
    return root_of_unity(1, 8, order) + root_of_unity(-1, 8, order)


def common_order(*scalars) -> int:
    """Least common cyclotomic order of the given scalars."""
    return math.lcm(*[s.order for s in scalars if isinstance(s, Scalar)] or [DEFAULT_ORDER])
