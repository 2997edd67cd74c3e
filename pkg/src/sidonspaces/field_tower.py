"""Finite fields built as towers of simple extensions.

An element of any field here is a plain ``int``.  Its base-``p`` digits are
its coordinates over the prime field, nested little-endian through every
extension step: the element ``c_0 + c_1 t + ... + c_{d-1} t^{d-1}`` of
``B[t]/(m(t))`` is encoded as ``sum(c_i * |B|**i)``.  Two consequences are
used throughout the package:

* the canonical embedding of a subfield in the chain is the identity on
  ints, and ``x`` lies in the chain subfield of order ``b`` iff ``x < b``;
* the coordinates of ``x`` over any chain subfield of order ``b`` are just
  the base-``b`` digits of ``x``.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InputError, ReducibleError

# Fields up to this order get full addition/multiplication tables.
TABLE_LIMIT = 729
DEFAULT_WORK_BOUND = 2**24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the orders used here."""
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def int_log(n: int, b: int) -> int:
    """Exact logarithm; raises if ``n`` is not a power of ``b``."""
    e, m = 0, 1
    while m < n:
        m *= b
        e += 1
    if m != n:
        raise InputError(f"{n} is not a power of {b}")
    return e


def to_digits(x: int, b: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        x, r = divmod(x, b)
        out.append(r)
    return out


def from_digits(ds: Iterable[int], b: int) -> int:
    x, m = 0, 1
    for d in ds:
        x += d * m
        m *= b
    return x


class Field:
    """Shared behaviour of prime and extension fields."""

    p: int
    order: int
    base: "Field | None"
    degree: int
    prime_degree: int
    key: tuple

    def __eq__(self, other):
        return isinstance(other, Field) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- structure -------------------------------------------------------
    def chain(self) -> list["Field"]:
        """Fields from ``self`` down to the prime field."""
        out, f = [], self
        while f is not None:
            out.append(f)
            f = f.base
        return out

    def subfield(self, order: int) -> "Field":
        for f in self.chain():
            if f.order == order:
                return f
        raise InputError(f"no subfield of order {order} in the chain of {self!r}")

    def degree_over(self, order: int) -> int:
        return int_log(self.order, order)

    def digits(self, x: int, order: int | None = None) -> list[int]:
        """Coordinates of ``x`` over the chain subfield of the given order."""
        b = self.base.order if order is None else order
        return to_digits(x, b, int_log(self.order, b))

    def flat(self, x: int) -> list[int]:
        return to_digits(x, self.p, self.prime_degree)

    def in_chain_subfield(self, x: int, order: int) -> bool:
        return x < order

    def elements(self) -> range:
        return range(self.order)

    # -- arithmetic shared by both kinds --------------------------------
    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, x: int, e: int) -> int:
        if e == 0:
            return 1
        if x == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        e %= self.order - 1
        result, b = 1, x
        while e:
            if e & 1:
                result = self.mul(result, b)
            b = self.mul(b, b)
            e >>= 1
        return result

    def frob(self, x: int, q: int, i: int = 1) -> int:
        """``x ** (q ** i)``; ``i`` may be negative."""
        d = self.degree_over(q)
        return self.pow(x, q ** (i % d))

    def scalar(self, c: int) -> int:
        """Prime-field integer ``c`` as a field element."""
        return c % self.p

    def sum(self, xs: Iterable[int]) -> int:
        s = 0
        for x in xs:
            s = self.add(s, x)
        return s

    def order_of(self, x: int) -> int:
        """Multiplicative order of a nonzero element."""
        if x == 0:
            raise InputError("0 has no multiplicative order")
        n = self.order - 1
        for r in factorize(n):
            while n % r == 0 and self.pow(x, n // r) == 1:
                n //= r
        return n

    def primitive_element(self) -> int:
        try:
            return self._primitive
        except AttributeError:
            pass
        n = self.order - 1
        rs = list(factorize(n)) if n > 1 else []
        for x in range(1, self.order):
            if all(self.pow(x, n // r) != 1 for r in rs):
                self._primitive = x
                return x
        raise AssertionError("no primitive element found")  # unreachable


class PrimeField(Field):
    def __init__(self, p: int):
        if not is_prime(p):
            raise InputError(f"{p} is not prime")
        self.p = p
        self.order = p
        self.base = None
        self.degree = 1
        self.prime_degree = 1
        self.key = ("F", p)

    def __repr__(self):
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)


class ExtensionField(Field):
    """``base[t] / (modulus)`` for a monic irreducible ``modulus``.

    ``modulus`` lists base-field coefficients low degree first and includes
    the leading 1.
    """

    def __init__(self, base: Field, modulus: Sequence[int]):
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise InputError("modulus must be monic of degree >= 1")
        self.base = base
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.p = base.p
        self.order = base.order ** self.degree
        self.prime_degree = base.prime_degree * self.degree
        self.key = ("E", base.key, modulus)
        if self.order <= TABLE_LIMIT:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.prime_degree}) over {self.base!r} mod {list(self.modulus)}"

    # Generic arithmetic via the base field.  Shadowed by tables when small.
    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        B, bo = self.base, self.base.order
        out, m = 0, 1
        while a or b:
            a, x = divmod(a, bo)
            b, y = divmod(b, bo)
            out += B.add(x, y) * m
            m *= bo
        return out

    def neg(self, a):
        if self.p == 2:
            return a
        B, bo = self.base, self.base.order
        out, m = 0, 1
        while a:
            a, x = divmod(a, bo)
            out += B.neg(x) * m
            m *= bo
        return out

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        B, bo, d = self.base, self.base.order, self.degree
        ad = to_digits(a, bo, d)
        bd = to_digits(b, bo, d)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(ad):
            if x:
                for j, y in enumerate(bd):
                    if y:
                        prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        mod = self.modulus
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c:
                for j in range(d):
                    if mod[j]:
                        prod[i - d + j] = B.sub(prod[i - d + j], B.mul(c, mod[j]))
        return from_digits(prod[:d], bo)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 2)

    def _build_tables(self):
        p, N, order = self.p, self.prime_degree, self.order
        pw = p ** np.arange(N, dtype=np.int64)
        D = (np.arange(order, dtype=np.int64)[:, None] // pw) % p
        basis = [p**s for s in range(N)]
        M = np.array(
            [[self.flat(ExtensionField.mul(self, u, v)) for v in basis] for u in basis],
            dtype=np.int64,
        )
        T = np.einsum("as,srt->art", D, M) % p
        prod = np.einsum("br,art->abt", D, T) % p
        mt = (prod @ pw).tolist()
        at = (((D[:, None, :] + D[None, :, :]) % p) @ pw).tolist()
        nt = (((-D) % p) @ pw).tolist()
        it = [0] * order
        for a in range(1, order):
            it[a] = mt[a].index(1)
        self.mul = lambda a, b: mt[a][b]
        self.add = lambda a, b: at[a][b]
        self.neg = lambda a: nt[a]
        self.sub = lambda a, b: at[a][nt[b]]

        def inv(a):
            if a == 0:
                raise ZeroDivisionError("0 has no inverse")
            return it[a]

        self.inv = inv


@lru_cache(maxsize=None)
def prime_field(p: int) -> PrimeField:
    return PrimeField(p)


@lru_cache(maxsize=None)
def extension_field(base: Field, modulus: tuple) -> ExtensionField:
    return ExtensionField(base, modulus)


# --------------------------------------------------------------------------
# Polynomials over a Field (lists of ints, low degree first)


def poly_trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], f: Sequence[int], F: Field) -> list[int]:
    a = poly_trim(a)
    df = len(f) - 1
    lead_inv = F.inv(f[-1])
    while len(a) - 1 >= df:
        c = F.mul(a[-1], lead_inv)
        s = len(a) - 1 - df
        for j in range(df + 1):
            if f[j]:
                a[s + j] = F.sub(a[s + j], F.mul(c, f[j]))
        a = poly_trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], F: Field) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return poly_trim(out)


def poly_sub(a: Sequence[int], b: Sequence[int], F: Field) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return poly_trim([F.sub(x, y) for x, y in zip(a, b)])


def poly_gcd(a: Sequence[int], b: Sequence[int], F: Field) -> list[int]:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_mod(a, b, F)
    if a:
        c = F.inv(a[-1])
        a = [F.mul(c, x) for x in a]
    return a


def poly_x_power_mod(e: int, f: Sequence[int], F: Field) -> list[int]:
    """``x**e mod f``."""
    result, b = [1], poly_mod([0, 1], f, F)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, b, F), f, F)
        b = poly_mod(poly_mul(b, b, F), f, F)
        e >>= 1
    return result


def poly_eval(f: Sequence[int], x: int, F: Field) -> int:
    acc = 0
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def is_irreducible(F: Field, f: Sequence[int]) -> bool:
    """Rabin's irreducibility test over ``F``."""
    f = poly_trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    Q = F.order
    if poly_sub(poly_x_power_mod(Q**d, f, F), [0, 1], F):
        return False
    for r in factorize(d):
        h = poly_sub(poly_x_power_mod(Q ** (d // r), f, F), [0, 1], F)
        if len(poly_gcd(h, f, F)) > 1:
            return False
    return True


class IrreducibleCache:
    """JSON file mapping a base-field key and degree to a lex-least polynomial."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = path
        self._data: dict[str, list[int]] = {}
        if path and os.path.exists(path):
            with open(path) as fh:
                self._data = json.load(fh)

    @staticmethod
    def _key(F: Field, degree: int) -> str:
        return json.dumps([repr(F.key), degree])

    def get(self, F: Field, degree: int):
        return self._data.get(self._key(F, degree))

    def put(self, F: Field, degree: int, poly: Sequence[int]):
        self._data[self._key(F, degree)] = list(poly)
        if self.path:
            tmp = f"{self.path}.tmp"
            with open(tmp, "w") as fh:
                json.dump(self._data, fh, sort_keys=True)
            os.replace(tmp, self.path)


def lex_least_irreducible(F: Field, degree: int, cache: IrreducibleCache | None = None) -> tuple[int, ...]:
    """Smallest monic irreducible of the given degree over ``F``.

    Candidates are ordered by their coefficient tuple ``(c_0, ..., c_{d-1})``
    compared lexicographically, constant term first.
    """
    if cache is not None:
        hit = cache.get(F, degree)
        if hit is not None:
            return tuple(hit)
    for cs in itertools.product(range(F.order), repeat=degree):
        if degree > 1 and cs[0] == 0:
            continue
        f = list(cs) + [1]
        if is_irreducible(F, f):
            if cache is not None:
                cache.put(F, degree, f)
            return tuple(f)
    raise AssertionError("irreducible polynomials exist in every degree")


# --------------------------------------------------------------------------
# Towers

LEVELS = ("base", "mid", "top")


@dataclass(frozen=True, eq=False)
class FieldTower:
    """``F_q  <  F_{q^k}  <  F_{q^n}`` with ``n = k * ell``.

    ``gamma`` is the class of ``t`` in ``F_{q^k}[t] / (top_poly)``.
    """

    p: int
    h: int
    k: int
    ell: int
    base_poly: tuple | None
    mid_poly: tuple | None
    top_poly: tuple
    base: Field
    mid: Field
    top: Field

    @property
    def q(self) -> int:
        return self.base.order

    @property
    def n(self) -> int:
        return self.k * self.ell

    @property
    def gamma(self) -> int:
        return self.mid.order

    def field(self, level: str) -> Field:
        try:
            return {"base": self.base, "mid": self.mid, "top": self.top}[level]
        except KeyError:
            raise InputError(f"unknown level {level!r}") from None

    def level_degree(self, level: str) -> int:
        """Degree of the level over ``F_q``."""
        return {"base": 1, "mid": self.k, "top": self.n}[level]

    def element(self, level: str, value) -> "FieldElement":
        """Element from an int or from coordinates over the level below."""
        F = self.field(level)
        if not isinstance(value, int):
            below = F.base.order if F.base is not None else F.p
            value = from_digits(value, below) if F.base is not None else int(value[0])
        if not 0 <= value < F.order:
            raise InputError(f"value {value} out of range for {level}")
        return FieldElement(self, level, value)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "h": self.h,
            "k": self.k,
            "ell": self.ell,
            "base_poly": list(self.base_poly) if self.base_poly else None,
            "mid_poly": list(self.mid_poly) if self.mid_poly else None,
            "top_poly": [self.mid.digits(c, self.q) if self.k > 1 else [c] for c in self.top_poly],
        }

    def tower_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.tower_hash())

    def __repr__(self):
        return f"FieldTower(q={self.p}^{self.h}, k={self.k}, n={self.n})"


def _as_poly(spec, F: Field, q: int) -> list[int]:
    out = []
    for c in spec:
        if isinstance(c, (list, tuple)):
            c = from_digits([int(x) % F.p if q == F.p else int(x) for x in c], q)
        else:
            c = int(c)
            if F.base is None:
                c %= F.p
        if not 0 <= c < F.order:
            raise InputError(f"coefficient {c} outside field of order {F.order}")
        out.append(c)
    return out


def _checked_poly(F: Field, spec, degree: int, q: int, what: str) -> tuple[int, ...]:
    f = poly_trim(_as_poly(spec, F, q))
    if len(f) - 1 != degree:
        raise InputError(f"{what} has degree {len(f) - 1}, expected {degree}")
    lead = F.inv(f[-1])
    f = [F.mul(lead, c) for c in f]
    if not is_irreducible(F, f):
        raise ReducibleError(f"{what} {f} is reducible over {F!r}")
    return tuple(f)


def build_tower(
    p: int,
    h: int,
    k: int,
    ell: int,
    mid_spec=None,
    top_spec: Sequence | Callable[[Field], Sequence] | None = None,
    base_spec=None,
    work_bound: int = DEFAULT_WORK_BOUND,
    cache: IrreducibleCache | None = None,
) -> FieldTower:
    """Construct a tower, choosing lex-least irreducibles where unspecified.

    ``top_spec`` may be a callable receiving the middle field, which helps
    when its coefficients are most naturally written as powers of the middle
    generator.
    """
    if not is_prime(p):
        raise InputError(f"p={p} is not prime")
    if h < 1 or k < 1:
        raise InputError("h and k must be positive")
    if ell < 2:
        raise InputError("ell must be at least 2")
    size = p ** (h * k * ell)
    if size > work_bound:
        raise BudgetExceeded("tower size q^n", size, work_bound)

    Fp = prime_field(p)
    if h == 1:
        base, base_poly = Fp, None
    else:
        base_poly = (
            _checked_poly(Fp, base_spec, h, p, "base_poly")
            if base_spec is not None
            else lex_least_irreducible(Fp, h, cache)
        )
        base = extension_field(Fp, base_poly)
    q = base.order

    if k == 1:
        if mid_spec is not None:
            raise InputError("mid_spec given for k=1")
        mid, mid_poly = base, None
    else:
        mid_poly = (
            _checked_poly(base, mid_spec, k, q, "mid_poly")
            if mid_spec is not None
            else lex_least_irreducible(base, k, cache)
        )
        mid = extension_field(base, mid_poly)

    if callable(top_spec):
        top_spec = top_spec(mid)
    top_poly = (
        _checked_poly(mid, top_spec, ell, q, "top_poly")
        if top_spec is not None
        else lex_least_irreducible(mid, ell, cache)
    )
    top = extension_field(mid, top_poly)
    return FieldTower(p, h, k, ell, base_poly, mid_poly, top_poly, base, mid, top)


def tower_from_dict(d: dict, **kwargs) -> FieldTower:
    return build_tower(
        int(d["p"]),
        int(d.get("h", 1)),
        int(d["k"]),
        int(d["ell"]),
        mid_spec=d.get("mid_poly"),
        top_spec=d.get("top_poly"),
        base_spec=d.get("base_poly"),
        **kwargs,
    )


# --------------------------------------------------------------------------
# Element values


@dataclass(frozen=True)
class FieldElement:
    """A tower element at a given level.  Mixed-level arithmetic embeds up."""

    tower: FieldTower
    level: str
    value: int

    @property
    def field(self) -> Field:
        return self.tower.field(self.level)

    @property
    def coeffs(self) -> list[int]:
        F = self.field
        if F.base is None:
            return [self.value]
        return F.digits(self.value)

    def _coerce(self, other):
        if isinstance(other, int):
            return self, FieldElement(self.tower, self.level, self.field.scalar(other))
        if not isinstance(other, FieldElement) or other.tower != self.tower:
            raise InputError("operands from different towers")
        if LEVELS.index(other.level) > LEVELS.index(self.level):
            return embed(self, other.level), other
        if LEVELS.index(other.level) < LEVELS.index(self.level):
            return self, embed(other, self.level)
        return self, other

    def _wrap(self, v):
        return FieldElement(self.tower, self.level, v)

    def __add__(self, other):
        a, b = self._coerce(other)
        return a._wrap(a.field.add(a.value, b.value))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a._wrap(a.field.sub(a.value, b.value))

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return a._wrap(a.field.sub(b.value, a.value))

    def __mul__(self, other):
        a, b = self._coerce(other)
        return a._wrap(a.field.mul(a.value, b.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._coerce(other)
        return a._wrap(a.field.div(a.value, b.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def inverse(self):
        return self._wrap(self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self):
        return f"<{self.level} {self.coeffs}>"


def frobenius(x: FieldElement, i: int, p_power: bool = False) -> FieldElement:
    """``x ** (q ** i)``, or ``x ** (p ** i)`` when ``p_power`` is set."""
    F = x.field
    r = x.tower.p if p_power else x.tower.q
    return x._wrap(F.frob(x.value, r, i))


def norm(x: FieldElement, sub_degree: int) -> FieldElement:
    """Norm from the level of ``x`` down to ``F_{q^sub_degree}``."""
    t = x.tower
    d = t.level_degree(x.level)
    if sub_degree < 1 or d % sub_degree:
        raise InputError(f"sub_degree {sub_degree} does not divide {d}")
    q = t.q
    v = x.field.pow(x.value, (q**d - 1) // (q**sub_degree - 1))
    level = x.level
    for cand in LEVELS:
        if t.level_degree(cand) == sub_degree:
            level = cand
            break
    return FieldElement(t, level, v)


def embed(x: FieldElement, level: str) -> FieldElement:
    if LEVELS.index(level) < LEVELS.index(x.level):
        raise InputError(f"cannot embed {x.level} element into {level}")
    return FieldElement(x.tower, level, x.value)


def project(x: FieldElement, level: str) -> FieldElement | None:
    if LEVELS.index(level) > LEVELS.index(x.level):
        raise InputError(f"cannot project {x.level} element up to {level}")
    if x.value < x.tower.field(level).order:
        return FieldElement(x.tower, level, x.value)
    return None


def element_to_json(F: Field, x: int, q: int):
    """Nested little-endian coordinate lists, stopping at ``F_q``."""
    if F.order == q:
        return x
    return [element_to_json(F.base, c, q) for c in F.digits(x)]


def element_from_json(F: Field, data, q: int) -> int:
    if F.order == q:
        if not isinstance(data, int) or not 0 <= data < q:
            raise InputError(f"bad F_q element {data!r}")
        return data
    if not isinstance(data, list) or len(data) != F.degree:
        raise InputError(f"expected {F.degree} coordinates, got {data!r}")
    return from_digits([element_from_json(F.base, c, q) for c in data], F.base.order)
