"""Weighted graded polynomial ring S = K[x_0..x_n], deg x_i = w_i.

Monomials are exponent tuples. Polynomials are sparse ``{exponents: coeff}``
maps with exact (int or Fraction) coefficients. Elements of S (x) S are
polynomials whose exponent tuple is the concatenation ``left + right``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import DegreeError, FieldError

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(x) for x in self.weights))
        if len(self.weights) < 2:
            raise ValueError("need at least two weights (n >= 1)")
        if any(x < 1 for x in self.weights):
            raise ValueError(f"weights must be positive, got {self.weights}")

    @classmethod
    def parse(cls, text: str) -> "WeightVector":
        return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))

    @property
    def n(self) -> int:
        return len(self.weights) - 1

    @property
    def nvars(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def weight_of(self, subset: Iterable[int]) -> int:
        return sum(self.weights[i] for i in subset)

    def subsets(self, size: int) -> list[tuple[int, ...]]:
        return list(combinations(range(self.nvars), size))

    def __str__(self):
        return ",".join(map(str, self.weights))


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Coefficient field used for rank computations: rationals or F_p."""

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None and not _is_prime(self.prime):
            raise FieldError(f"{self.prime} is not prime")

    @classmethod
    def parse(cls, text: str) -> "FieldConfig":
        text = text.strip().lower()
        if text in ("q", "qq", "rationals"):
            return cls()
        if text.startswith("fp:"):
            return cls(int(text[3:]))
        raise FieldError(f"unknown field {text!r}; use 'q' or 'fp:P'")

    @property
    def is_rational(self) -> bool:
        return self.prime is None

    def check_for(self, w: WeightVector) -> None:
        if self.prime is not None and self.prime <= w.total:
            raise FieldError(f"prime {self.prime} must exceed total weight {w.total}")

    def __str__(self):
        return "q" if self.prime is None else f"fp:{self.prime}"


RATIONALS = FieldConfig()


# --- index subsets ----------------------------------------------------------

def n_below(subset: Iterable[int], i: int) -> int:
    """#{j in subset : j < i}, the Koszul sign exponent."""
    return sum(1 for j in subset if j < i)


def koszul_sign(subset: Iterable[int], i: int) -> int:
    return -1 if n_below(subset, i) % 2 else 1


def remove(subset: tuple[int, ...], i: int) -> tuple[int, ...]:
    return tuple(j for j in subset if j != i)


# --- graded pieces ----------------------------------------------------------

def monomial_degree(weights: tuple[int, ...], exps: Monomial) -> int:
    return sum(e * wi for e, wi in zip(exps, weights))


@lru_cache(maxsize=None)
def _basis(weights: tuple[int, ...], a: int) -> tuple[Monomial, ...]:
    if a < 0:
        return ()
    out: list[Monomial] = []

    def rec(i: int, rem: int, prefix: list[int]):
        if i == len(weights) - 1:
            if rem % weights[i] == 0:
                out.append(tuple(prefix + [rem // weights[i]]))
            return
        # descending exponent of the current variable gives lex order
        for e in range(rem // weights[i], -1, -1):
            rec(i + 1, rem - e * weights[i], prefix + [e])

    rec(0, a, [])
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(weights: tuple[int, ...], a: int) -> Mapping[Monomial, int]:
    return {m: idx for idx, m in enumerate(_basis(weights, a))}


def monomial_basis(w: WeightVector, a: int) -> list[Monomial]:
    """Lex-ordered monomial basis of S_a (x_0 > x_1 > ...); empty for a < 0."""
    return list(_basis(w.weights, a))


@lru_cache(maxsize=None)
def _dim(weights: tuple[int, ...], a: int) -> int:
    if a < 0:
        return 0
    # coin-change count
    table = [1] + [0] * a
    for wi in weights:
        for t in range(wi, a + 1):
            table[t] += table[t - wi]
    return table[a]


def dim_graded_piece(w: WeightVector, a: int) -> int:
    return _dim(w.weights, a)


def hilbert_coefficients(w: WeightVector, upto: int) -> list[int]:
    """dim S_0, ..., dim S_upto."""
    return [_dim(w.weights, a) for a in range(upto + 1)]


def coh_P_line_bundle(w: WeightVector, m: int) -> tuple[int, ...]:
    """(h^0, ..., h^n) of O(m) on the weighted projective stack."""
    table = [0] * (w.n + 1)
    table[0] = dim_graded_piece(w, m)
    table[w.n] += dim_graded_piece(w, -m - w.total)
    return tuple(table)


# --- polynomials ------------------------------------------------------------

def _clean(terms: Mapping[Monomial, object]) -> dict[Monomial, object]:
    return {k: v for k, v in terms.items() if v != 0}


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial; treat as immutable."""

    terms: Mapping[Monomial, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    @classmethod
    def monomial(cls, exps: Monomial, coeff=1) -> "Polynomial":
        return cls({tuple(exps): coeff})

    @classmethod
    def variable(cls, nvars: int, i: int, coeff=1) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = 1
        return cls({tuple(exps): coeff})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return type(self)(out)

    def __neg__(self) -> "Polynomial":
        return type(self)({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return type(self)({k: v * other for k, v in self.terms.items()})
        out: dict[Monomial, object] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return type(self)(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __iter__(self) -> Iterator[tuple[Monomial, object]]:
        return iter(sorted(self.terms.items(), reverse=True))

    def degree(self, weights: tuple[int, ...]) -> int | None:
        """Common weighted degree; None for zero; DegreeError if inhomogeneous."""
        degs = {monomial_degree(weights, k) for k in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def to_json(self) -> list[dict]:
        return [{"exponents": list(k), "coefficient": str(Fraction(v))} for k, v in self]

    @classmethod
    def from_json(cls, data: list[dict]) -> "Polynomial":
        return cls({tuple(t["exponents"]): Fraction(t["coefficient"]) for t in data})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self:
            mono = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(k) if e
            )
            parts.append(f"{v}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


class BiEntry(Polynomial):
    """Element of S (x) S; exponent tuples are ``left + right``.

    The left factor acts on the first index of O(a, b).
    """

    @classmethod
    def pure(cls, left: Monomial, right: Monomial, coeff=1) -> "BiEntry":
        return cls({tuple(left) + tuple(right): coeff})

    @classmethod
    def x_left(cls, nvars: int, i: int, coeff=1) -> "BiEntry":
        e = [0] * (2 * nvars)
        e[i] = 1
        return cls({tuple(e): coeff})

    @classmethod
    def x_right(cls, nvars: int, i: int, coeff=1) -> "BiEntry":
        e = [0] * (2 * nvars)
        e[nvars + i] = 1
        return cls({tuple(e): coeff})

    @staticmethod
    def split(key: Monomial) -> tuple[Monomial, Monomial]:
        h = len(key) // 2
        return key[:h], key[h:]

    def bidegree(self, weights: tuple[int, ...]) -> tuple[int, int] | None:
        degs = set()
        for k in self.terms:
            left, right = self.split(k)
            degs.add((monomial_degree(weights, left), monomial_degree(weights, right)))
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"entry is not bihomogeneous (bidegrees {sorted(degs)})")
        return degs.pop()

    def collapse(self) -> Polynomial:
        """Multiplication map S (x) S -> S."""
        out: dict[Monomial, object] = {}
        for k, v in self.terms.items():
            left, right = self.split(k)
            m = tuple(a + b for a, b in zip(left, right))
            out[m] = out.get(m, 0) + v
        return Polynomial(out)

    def swapped(self) -> "BiEntry":
        out = {}
        for k, v in self.terms.items():
            left, right = self.split(k)
            out[right + left] = v
        return BiEntry(out)

    def to_json(self) -> list[dict]:
        out = []
        for k, v in self:
            left, right = self.split(k)
            out.append({"left_exps": list(left), "right_exps": list(right), "coeff": str(Fraction(v))})
        return out

    @classmethod
    def from_json(cls, data: list[dict]) -> "BiEntry":
        return cls({tuple(t["left_exps"]) + tuple(t["right_exps"]): Fraction(t["coeff"]) for t in data})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self:
            left, right = self.split(k)

            def fmt(e):
                s = "*".join(f"x{i}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p)
                return s or "1"

            parts.append(f"{v}*({fmt(left)} (x) {fmt(right)})")
        return " + ".join(parts)


def mult_matrix(w: WeightVector, f: Polynomial, a: int) -> list[list]:
    """Dense matrix of S_a -> S_{a+deg f}, u -> f*u, in lex monomial bases.

    Rows index the target basis, columns the source basis.
    """
    d = f.degree(w.weights)
    if d is None:
        raise DegreeError("cannot infer the degree of the zero polynomial")
    src = _basis(w.weights, a)
    tgt_index = basis_index(w.weights, a + d)
    mat = [[0] * len(src) for _ in range(len(tgt_index))]
    for c, u in enumerate(src):
        for mono, coeff in f.terms.items():
            r = tgt_index[tuple(x + y for x, y in zip(u, mono))]
            mat[r][c] += coeff
    return mat
