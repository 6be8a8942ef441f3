"""Small exact matrix kernel on nested tuples of ints and Fractions.

Matrices are tuples of row tuples. Nothing here ever touches floats.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from paramod.errors import InvalidInputError, NotUnimodularError

Matrix = tuple  # tuple[tuple[int | Fraction, ...], ...]


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(_exact(x) for x in row) for row in rows)
    if not out or not out[0]:
        raise InvalidInputError("empty matrix")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise InvalidInputError("ragged matrix rows")
    return out


def _exact(x):
    if isinstance(x, bool):
        raise InvalidInputError("boolean is not a matrix entry")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _exact(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        try:
            return _exact(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"not an exact rational: {x!r}") from exc
    if hasattr(x, "__index__"):
        return int(x)
    raise InvalidInputError(f"not an exact number: {x!r}")


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), len(m[0])


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a[0]) != len(b):
        raise InvalidInputError(f"shape mismatch {shape(a)} @ {shape(b)}")
    bt = tuple(zip(*b))
    return tuple(
        tuple(_exact_sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def _exact_sum(terms):
    s = sum(terms)
    if isinstance(s, Fraction) and s.denominator == 1:
        return int(s)
    return s


def matprod(*ms: Matrix) -> Matrix:
    out = ms[0]
    for m in ms[1:]:
        out = matmul(out, m)
    return out


def vecmat(v: Sequence, m: Matrix) -> tuple:
    """Row vector times matrix."""
    if len(v) != len(m):
        raise InvalidInputError(f"length {len(v)} vector against {len(m)}-row matrix")
    return tuple(_exact_sum(v[i] * m[i][j] for i in range(len(v))) for j in range(len(m[0])))


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c, m: Matrix) -> Matrix:
    return tuple(tuple(_exact(c * x) for x in row) for row in m)


def is_integral(m: Matrix) -> bool:
    return all(isinstance(x, int) for row in m for x in row)


def to_int(m: Matrix) -> Matrix:
    if not is_integral(m):
        raise InvalidInputError("matrix has non-integer entries")
    return m


def block(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Matrix:
    top = tuple(ra + rb for ra, rb in zip(a, b))
    bottom = tuple(rc + rd for rc, rd in zip(c, d))
    return top + bottom


def diag(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n))


def det(m: Matrix):
    """Exact determinant. Bareiss elimination for integer input."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise InvalidInputError("determinant of a non-square matrix")
    if not is_integral(m):
        return _det_fraction(m)
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_fraction(m: Matrix):
    a = [[Fraction(x) for x in r] for r in m]
    n = len(a)
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        result *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return _exact(result)


def inverse(m: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan over Q."""
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise InvalidInputError("singular matrix")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return as_matrix(r[n:] for r in a)


def unimodular_inverse(m: Matrix) -> Matrix:
    """Inverse of an integer matrix with determinant +-1, as an integer matrix."""
    d = det(m)
    if d not in (1, -1):
        raise NotUnimodularError(f"determinant {d} is not a unit")
    return inverse(m)


# ---------------------------------------------------------------------------
# textual forms

def entry_to_json(x):
    if isinstance(x, int):
        return x
    return f"{x.numerator}/{x.denominator}"


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": len(m), "entries": [[entry_to_json(x) for x in r] for r in m]}


def matrix_from_json(doc) -> Matrix:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if isinstance(doc, dict):
        rows = doc.get("entries")
        if rows is None:
            raise InvalidInputError("matrix JSON needs an 'entries' field")
        m = as_matrix(rows)
        if "rows" in doc and doc["rows"] != len(m):
            raise InvalidInputError(f"'rows' says {doc['rows']} but {len(m)} rows given")
        return m
    return as_matrix(doc)


def parse_matrix(text: str) -> Matrix:
    """Rows separated by ';', entries by ','. A leading '@' reads a file."""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            content = fh.read().strip()
        if content.startswith("{") or content.startswith("["):
            return matrix_from_json(content)
        text = " ".join(content.splitlines())
        text = text.replace(" ", "")
    if not text:
        raise InvalidInputError("empty matrix text")
    return as_matrix(
        [tok for tok in row.split(",") if tok.strip() != ""] for row in text.split(";") if row.strip()
    )


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError as exc:
        raise InvalidInputError(f"not an integer vector: {text!r}") from exc
