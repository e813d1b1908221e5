"""Truncated power series in q, y_1, ..., y_l with exact integer coefficients.

A series keeps one dict per q-degree 0..M.  Within a degree the y-exponent
vector is packed into a single int, most significant field first, so that
vector addition is integer addition and integer order is lexicographic
order on the vectors.  Exponents must stay below ``2**FIELD_BITS``.
"""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Iterator

FIELD_BITS = 24
FIELD_MAX = (1 << FIELD_BITS) - 1


class SeriesError(ValueError):
    pass


def pack(y: Iterable[int], rank: int) -> int:
    y = tuple(y)
    if len(y) != rank:
        raise SeriesError(f"y-exponent vector {y} has length {len(y)}, expected {rank}")
    v = 0
    for e in y:
        if e < 0 or e > FIELD_MAX:
            raise SeriesError(f"y-exponent {e} out of range")
        v = (v << FIELD_BITS) | e
    return v


def unpack(v: int, rank: int) -> tuple[int, ...]:
    out = [0] * rank
    for i in range(rank - 1, -1, -1):
        out[i] = v & FIELD_MAX
        v >>= FIELD_BITS
    return tuple(out)


class TruncatedSeries:
    """Sparse series truncated at q-degree ``truncation`` (inclusive).

    Treat instances as immutable once built; the arithmetic functions
    below always return fresh objects.
    """

    __slots__ = ("rank", "truncation", "layers")

    def __init__(self, rank: int, truncation: int, layers=None):
        if truncation < 0:
            raise SeriesError("truncation must be nonnegative")
        self.rank = rank
        self.truncation = truncation
        if layers is None:
            layers = [dict() for _ in range(truncation + 1)]
        self.layers: list[dict[int, int]] = layers

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, rank: int, truncation: int) -> "TruncatedSeries":
        return cls(rank, truncation)

    @classmethod
    def one(cls, rank: int, truncation: int) -> "TruncatedSeries":
        s = cls(rank, truncation)
        s.layers[0][0] = 1
        return s

    @classmethod
    def from_terms(cls, rank: int, truncation: int, terms) -> "TruncatedSeries":
        """Build from ``{(q, y): c}`` or an iterable of ``((q, y), c)``;
        terms above the truncation are dropped."""
        s = cls(rank, truncation)
        items = terms.items() if isinstance(terms, dict) else terms
        for (q, y), c in items:
            if q < 0:
                raise SeriesError("negative q-degree")
            if q > truncation or not c:
                continue
            layer = s.layers[q]
            key = pack(y, rank)
            c = layer.get(key, 0) + c
            if c:
                layer[key] = c
            else:
                layer.pop(key, None)
        return s

    @classmethod
    def monomial(cls, rank: int, truncation: int, q: int, y, c: int = 1) -> "TruncatedSeries":
        return cls.from_terms(rank, truncation, [((q, tuple(y)), c)])

    def add_term(self, q: int, ykey: int, c: int) -> None:
        """In-place accumulation with a packed key; for builders only."""
        if q > self.truncation or not c:
            return
        layer = self.layers[q]
        c += layer.get(ykey, 0)
        if c:
            layer[ykey] = c
        else:
            del layer[ykey]

    # inspection -------------------------------------------------------

    def terms(self) -> Iterator[tuple[tuple[int, tuple[int, ...]], int]]:
        """Nonzero terms in canonical order: q ascending, then y lexicographic."""
        for q, layer in enumerate(self.layers):
            for key in sorted(layer):
                yield (q, unpack(key, self.rank)), layer[key]

    def coeff(self, q: int, y=None) -> int:
        if q > self.truncation or q < 0:
            raise SeriesError(f"q-degree {q} outside 0..{self.truncation}")
        if y is None:
            y = (0,) * self.rank
        return self.layers[q].get(pack(y, self.rank), 0)

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.rank == other.rank and self.truncation == other.truncation
                and self.layers == other.layers)

    def __repr__(self) -> str:
        return f"TruncatedSeries(rank={self.rank}, M={self.truncation}, {format_series(self)})"

    def __add__(self, other):
        return ts_add(self, other)

    def __sub__(self, other):
        return ts_add(self, ts_scale(other, -1))

    def __mul__(self, other):
        return ts_mul(self, other)

    def truncate(self, m: int) -> "TruncatedSeries":
        m = min(m, self.truncation)
        return TruncatedSeries(self.rank, m, [dict(layer) for layer in self.layers[: m + 1]])

    def q_coefficients(self) -> list[int]:
        """Coefficients of the y-specialized series, q^0..q^M."""
        return [sum(layer.values()) for layer in self.layers]

    # serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "truncation": self.truncation,
            "terms": [{"q": q, "y": list(y), "c": str(c)} for (q, y), c in self.terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TruncatedSeries":
        return cls.from_terms(
            int(d["rank"]), int(d["truncation"]),
            [((int(t["q"]), tuple(int(e) for e in t["y"])), int(t["c"])) for t in d["terms"]],
        )


def _check_ranks(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.rank != b.rank:
        raise SeriesError(f"rank mismatch: {a.rank} vs {b.rank}")


def ts_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_ranks(a, b)
    m = min(a.truncation, b.truncation)
    out = TruncatedSeries(a.rank, m)
    for q in range(m + 1):
        layer = dict(a.layers[q])
        for key, c in b.layers[q].items():
            c += layer.get(key, 0)
            if c:
                layer[key] = c
            else:
                del layer[key]
        out.layers[q] = layer
    return out


def ts_scale(a: TruncatedSeries, factor: int) -> TruncatedSeries:
    if not factor:
        return TruncatedSeries(a.rank, a.truncation)
    return TruncatedSeries(a.rank, a.truncation,
                           [{k: c * factor for k, c in layer.items()} for layer in a.layers])


def ts_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_ranks(a, b)
    m = min(a.truncation, b.truncation)
    if len(a) < len(b):
        a, b = b, a
    out = TruncatedSeries(a.rank, m)
    # outer loop over the smaller operand
    for qb, lb in enumerate(b.layers[: m + 1]):
        for kb, cb in lb.items():
            for qa in range(m - qb + 1):
                target = out.layers[qa + qb]
                for ka, ca in a.layers[qa].items():
                    key = ka + kb
                    target[key] = target.get(key, 0) + ca * cb
    for layer in out.layers:
        for key in [k for k, c in layer.items() if not c]:
            del layer[key]
    return out


def ts_specialize_y(a: TruncatedSeries) -> TruncatedSeries:
    """Set every y_i = 1; the result has rank 0."""
    out = TruncatedSeries(0, a.truncation)
    for q, layer in enumerate(a.layers):
        total = sum(layer.values())
        if total:
            out.layers[q][0] = total
    return out


def divide_by_one_minus(a: TruncatedSeries, q_deg: int, y) -> TruncatedSeries:
    """a / (1 - q^q_deg y^y), q_deg >= 1, via g = a + x*g in ascending q."""
    if q_deg < 1:
        raise SeriesError("q-degree of the geometric ratio must be at least 1")
    shift = pack(y, a.rank)
    layers = [dict(layer) for layer in a.layers]
    for q in range(q_deg, a.truncation + 1):
        src = layers[q - q_deg]
        if not src:
            continue
        dst = layers[q]
        for key, c in src.items():
            k2 = key + shift
            c2 = dst.get(k2, 0) + c
            if c2:
                dst[k2] = c2
            else:
                del dst[k2]
    return TruncatedSeries(a.rank, a.truncation, layers)


def geometric_inverse_factor(y_mon, q_shift: int, M: int) -> TruncatedSeries:
    """prod_{n >= 0} (1 - q^(q_shift + n) y^y_mon)^(-1), truncated at q^M."""
    if q_shift < 1:
        raise SeriesError("q_shift must be >= 1 for a truncatable expansion")
    y_mon = tuple(y_mon)
    s = TruncatedSeries.one(len(y_mon), M)
    for n in range(q_shift, M + 1):
        s = divide_by_one_minus(s, n, y_mon)
    return s


@lru_cache(maxsize=4096)
def _inv_poch_coeffs(r: int, M: int) -> tuple[int, ...]:
    # 1/(q;q)_r; factors with i > M do not affect degrees <= M
    c = [0] * (M + 1)
    c[0] = 1
    for i in range(1, min(r, M) + 1):
        for d in range(i, M + 1):
            c[d] += c[d - i]
    return tuple(c)


def inv_q_pochhammer(r: int, M: int) -> TruncatedSeries:
    """1/(q;q)_r as a rank-0 series: partitions into at most r parts."""
    if r < 0:
        raise SeriesError("r must be nonnegative")
    s = TruncatedSeries(0, M)
    for d, c in enumerate(_inv_poch_coeffs(r, M)):
        if c:
            s.layers[d][0] = c
    return s


def inv_q_pochhammer_coeffs(r: int, M: int) -> tuple[int, ...]:
    """Plain coefficient tuple of 1/(q;q)_r up to q^M."""
    return _inv_poch_coeffs(r, M)


def first_mismatch(a: TruncatedSeries, b: TruncatedSeries):
    """Smallest key in canonical order where a and b differ, as
    ``((q, y), ca, cb)``; None when equal up to the common truncation."""
    _check_ranks(a, b)
    m = min(a.truncation, b.truncation)
    for q in range(m + 1):
        la, lb = a.layers[q], b.layers[q]
        if la == lb:
            continue
        for key in sorted(set(la) | set(lb)):
            ca, cb = la.get(key, 0), lb.get(key, 0)
            if ca != cb:
                return (q, unpack(key, a.rank)), ca, cb
    return None


def poly_from_factors(factors, M: int, rank: int) -> TruncatedSeries:
    """Expand prod (1 - q^a y^v) for (a, v) in factors, truncated at M."""
    s = TruncatedSeries.one(rank, M)
    for a, v in factors:
        s = ts_add(s, ts_mul(s, TruncatedSeries.monomial(rank, M, a, v, -1)))
    return s


def format_series(s: TruncatedSeries, max_terms: int = 12) -> str:
    parts = []
    for (q, y), c in s.terms():
        mono = [] if not q else ["q" if q == 1 else f"q^{q}"]
        mono += [f"y{i + 1}" if e == 1 else f"y{i + 1}^{e}" for i, e in enumerate(y) if e]
        body = "*".join(mono)
        if not body:
            parts.append(str(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{c}*{body}")
        if len(parts) >= max_terms:
            parts.append("...")
            break
    return " + ".join(parts).replace("+ -", "- ") or "0"
