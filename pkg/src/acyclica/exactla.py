"""Exact scalars and sparse linear algebra over Q and prime fields.

Matrices are immutable coordinate lists.  Elimination over Q is fraction-free
(integer rows with content removal); over F_p it is ordinary Gaussian
elimination with pivots normalised to 1.  Pivots are always the first nonzero
entry in row-major order, so every result is reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence


class FieldMismatchError(ValueError):
    pass


class ShapeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# fields


class Field:
    """Ground field.  Values are plain Python numbers: Fraction or int mod p."""

    name: str
    characteristic: int

    def __call__(self, x):
        return self.coerce(x)

    def coerce(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def encode(self, x) -> str | int:
        raise NotImplementedError

    def decode(self, s):
        raise NotImplementedError

    zero = 0
    one = 1

    def __repr__(self):
        return f"Field({self.name!r})"


class Rationals(Field):
    name = "Q"
    characteristic = 0

    def coerce(self, x):
        if isinstance(x, FieldScalar):
            if x.field != self:
                raise FieldMismatchError(f"{x.field.name} scalar used over Q")
            return x.value
        return Fraction(x)

    def inv(self, x):
        return 1 / Fraction(x)

    def encode(self, x):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"

    def decode(self, s):
        return Fraction(s)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"Fp:{p}"

    def coerce(self, x):
        if isinstance(x, FieldScalar):
            if x.field != self:
                raise FieldMismatchError(f"{x.field.name} scalar used over {self.name}")
            return x.value
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return pow(x, -1, self.p)

    def encode(self, x):
        return int(x)

    def decode(self, s):
        return int(s) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))


def _is_prime(n: int) -> bool:
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


QQ = Rationals()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


DEFAULT_FIELD = GF(101)


def parse_field(spec: str | Field) -> Field:
    """``"Q"`` or ``"Fp:<p>"``."""
    if isinstance(spec, Field):
        return spec
    s = spec.strip()
    if s in ("Q", "QQ"):
        return QQ
    if s.startswith("Fp:"):
        return GF(int(s[3:]))
    raise ValueError(f"unknown field spec {spec!r}")


@dataclass(frozen=True)
class FieldScalar:
    """A field element tagged with its field; arithmetic refuses mixed fields."""

    field: Field
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.coerce(self.value))

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field.name} vs {other.field.name}")
            return other.value
        return self.field.coerce(other)

    def _wrap(self, v):
        return FieldScalar(self.field, v)

    def __add__(self, other):
        return self._wrap(self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.value - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.value)

    def __mul__(self, other):
        return self._wrap(self.value * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def __truediv__(self, other):
        return self._wrap(self.value * self.field.inv(self._other(other)))

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field.encode(self.value)} in {self.field.name}"


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Immutable coordinate-list matrix over a field.

    ``entries`` is a tuple of ``(row, col, value)`` sorted row-major, with no
    duplicates and no stored zeros.  Optional row/column labels are opaque.
    """

    __slots__ = ("rows", "cols", "field", "entries", "row_labels", "col_labels", "_rowdicts", "_hash")

    def __init__(self, rows: int, cols: int, entries=(), field: Field = DEFAULT_FIELD,
                 row_labels: Sequence | None = None, col_labels: Sequence | None = None):
        if rows < 0 or cols < 0:
            raise ShapeError("negative dimension")
        acc: dict[tuple[int, int], object] = {}
        items = entries.items() if isinstance(entries, Mapping) else (((r, c), v) for r, c, v in entries)
        for (r, c), v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = field.coerce(v)
            if (r, c) in acc:
                raise ValueError(f"duplicate entry ({r}, {c})")
            acc[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self.field = field
        self.entries = tuple((r, c, v) for (r, c), v in sorted(acc.items()) if v != 0)
        if row_labels is not None and len(row_labels) != rows:
            raise ShapeError("row label count")
        if col_labels is not None and len(col_labels) != cols:
            raise ShapeError("column label count")
        self.row_labels = tuple(row_labels) if row_labels is not None else None
        self.col_labels = tuple(col_labels) if col_labels is not None else None
        self._rowdicts = None
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, rows, cols, field, rowdicts, row_labels=None, col_labels=None):
        """Build from per-row dicts of already-coerced nonzero values."""
        m = cls.__new__(cls)
        m.rows, m.cols, m.field = rows, cols, field
        ents = []
        for r in range(rows):
            d = rowdicts.get(r) if isinstance(rowdicts, dict) else rowdicts[r]
            if d:
                ents.extend((r, c, d[c]) for c in sorted(d) if d[c] != 0)
        m.entries = tuple(ents)
        m.row_labels = tuple(row_labels) if row_labels is not None else None
        m.col_labels = tuple(col_labels) if col_labels is not None else None
        m._rowdicts = None
        m._hash = None
        return m

    @classmethod
    def zero(cls, rows, cols, field=DEFAULT_FIELD):
        return cls(rows, cols, (), field)

    @classmethod
    def identity(cls, n, field=DEFAULT_FIELD):
        return cls(n, n, [(i, i, 1) for i in range(n)], field)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], field=DEFAULT_FIELD, cols: int | None = None):
        data = [list(r) for r in data]
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        return cls(len(data), ncols, [(i, j, v) for i, row in enumerate(data) for j, v in enumerate(row) if v != 0], field)

    @classmethod
    def column(cls, values: Sequence, field=DEFAULT_FIELD):
        return cls(len(values), 1, [(i, 0, v) for i, v in enumerate(values) if v != 0], field)

    # views -----------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.entries)

    def row_dicts(self) -> list[dict[int, object]]:
        if self._rowdicts is None:
            rd = [dict() for _ in range(self.rows)]
            for r, c, v in self.entries:
                rd[r][c] = v
            self._rowdicts = rd
        return self._rowdicts

    def to_dense(self) -> list[list]:
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def get(self, r, c):
        return self.row_dicts()[r].get(c, self.field.zero)

    def column_values(self, j) -> list:
        col = [self.field.zero] * self.rows
        for r, c, v in self.entries:
            if c == j:
                col[r] = v
        return col

    def is_zero(self) -> bool:
        return not self.entries

    def with_labels(self, row_labels=None, col_labels=None) -> "SparseMatrix":
        return SparseMatrix._raw(self.rows, self.cols, self.field, self.row_dicts(),
                                 row_labels if row_labels is not None else self.row_labels,
                                 col_labels if col_labels is not None else self.col_labels)

    # algebra ---------------------------------------------------------------

    def _check_field(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field.name} vs {other.field.name}")

    def transpose(self) -> "SparseMatrix":
        rd: dict[int, dict] = {}
        for r, c, v in self.entries:
            rd.setdefault(c, {})[r] = v
        return SparseMatrix._raw(self.cols, self.rows, self.field, rd, self.col_labels, self.row_labels)

    @property
    def T(self):
        return self.transpose()

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        f = self.field
        p = getattr(f, "p", None)
        brows = other.row_dicts()
        out: dict[int, dict] = {}
        for i, arow in enumerate(self.row_dicts()):
            if not arow:
                continue
            acc: dict[int, object] = {}
            for k, a in arow.items():
                for j, b in brows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            if p is not None:
                acc = {j: v % p for j, v in acc.items() if v % p}
            else:
                acc = {j: v for j, v in acc.items() if v}
            if acc:
                out[i] = acc
        return SparseMatrix._raw(self.rows, other.cols, f, out, self.row_labels, other.col_labels)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        acc = {(r, c): v for r, c, v in self.entries}
        for r, c, v in other.entries:
            acc[(r, c)] = acc.get((r, c), 0) + v
        return SparseMatrix(self.rows, self.cols, acc, self.field, self.row_labels, self.col_labels)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "SparseMatrix":
        s = self.field.coerce(s)
        return SparseMatrix(self.rows, self.cols, [(r, c, v * s) for r, c, v in self.entries], self.field,
                            self.row_labels, self.col_labels)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.field == other.field
                and self.entries == other.entries)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.field, self.entries))
        return self._hash

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz}, {self.field.name})"

    def apply(self, vec: Sequence) -> list:
        """Matrix times a dense vector."""
        if len(vec) != self.cols:
            raise ShapeError("vector length")
        out = [0] * self.rows
        for r, c, v in self.entries:
            out[r] += v * vec[c]
        return [self.field.coerce(x) for x in out]

    # serialization ---------------------------------------------------------

    def to_json_obj(self) -> dict:
        obj = {
            "rows": self.rows,
            "cols": self.cols,
            "field": self.field.name,
            "entries": [[r, c, self.field.encode(v)] for r, c, v in self.entries],
        }
        if self.row_labels is not None:
            obj["row_labels"] = [_label_json(x) for x in self.row_labels]
        if self.col_labels is not None:
            obj["col_labels"] = [_label_json(x) for x in self.col_labels]
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "SparseMatrix":
        field = parse_field(obj["field"])
        rl = obj.get("row_labels")
        cl = obj.get("col_labels")
        return cls(obj["rows"], obj["cols"], [(r, c, field.decode(v)) for r, c, v in obj["entries"]], field,
                   [_label_from_json(x) for x in rl] if rl is not None else None,
                   [_label_from_json(x) for x in cl] if cl is not None else None)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def loads(cls, s: str) -> "SparseMatrix":
        return cls.from_json_obj(json.loads(s))


def _label_json(x):
    if isinstance(x, tuple):
        return {"t": [_label_json(y) for y in x]}
    return x


def _label_from_json(x):
    if isinstance(x, dict) and set(x) == {"t"}:
        return tuple(_label_from_json(y) for y in x["t"])
    return x


def hstack(blocks: Sequence[SparseMatrix], field: Field | None = None) -> SparseMatrix:
    if not blocks:
        raise ShapeError("hstack of nothing")
    f = field or blocks[0].field
    rows = blocks[0].rows
    ents = []
    off = 0
    for b in blocks:
        if b.field != f:
            raise FieldMismatchError("hstack across fields")
        if b.rows != rows:
            raise ShapeError("hstack row mismatch")
        ents.extend((r, c + off, v) for r, c, v in b.entries)
        off += b.cols
    return SparseMatrix(rows, off, ents, f)


def vstack(blocks: Sequence[SparseMatrix], field: Field | None = None) -> SparseMatrix:
    if not blocks:
        raise ShapeError("vstack of nothing")
    f = field or blocks[0].field
    cols = blocks[0].cols
    ents = []
    off = 0
    for b in blocks:
        if b.field != f:
            raise FieldMismatchError("vstack across fields")
        if b.cols != cols:
            raise ShapeError("vstack column mismatch")
        ents.extend((r + off, c, v) for r, c, v in b.entries)
        off += b.rows
    return SparseMatrix(off, cols, ents, f)


def block_diag(blocks: Sequence[SparseMatrix], field: Field | None = None) -> SparseMatrix:
    f = field or (blocks[0].field if blocks else DEFAULT_FIELD)
    ents = []
    ro = co = 0
    for b in blocks:
        if b.field != f:
            raise FieldMismatchError("block_diag across fields")
        ents.extend((r + ro, c + co, v) for r, c, v in b.entries)
        ro += b.rows
        co += b.cols
    return SparseMatrix(ro, co, ents, f)


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    a._check_field(b)
    ents = [(ra * b.rows + rb, ca * b.cols + cb, va * vb)
            for ra, ca, va in a.entries for rb, cb, vb in b.entries]
    return SparseMatrix(a.rows * b.rows, a.cols * b.cols, ents, a.field)


# ---------------------------------------------------------------------------
# elimination


def _check_uniform(m: SparseMatrix):
    for _, _, v in m.entries:
        if isinstance(v, FieldScalar) and v.field != m.field:
            raise FieldMismatchError("mixed-field entries")


def _integer_rows(rows: Iterable[dict]) -> list[dict[int, int]]:
    """Clear denominators row by row (rank and row space unchanged)."""
    out = []
    for row in rows:
        if not row:
            out.append({})
            continue
        den = 1
        for v in row.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        irow = {c: int(v * den) for c, v in row.items()}
        out.append(_primitive(irow))
    return out


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class _Echelon:
    """Incremental row echelon form.

    ``pivots`` maps pivot column -> reduced row.  Over F_p pivot rows are
    normalised to leading coefficient 1; over Q rows are primitive integer
    vectors and reduction is fraction-free.
    """

    def __init__(self, field: Field):
        self.field = field
        self.p = getattr(field, "p", None)
        self.pivots: dict[int, dict] = {}
        self.order: list[int] = []

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        pivots = self.pivots
        p = self.p
        if p is not None:
            while row:
                c = min(row)
                prow = pivots.get(c)
                if prow is None:
                    return row
                f = row[c]
                for j, v in prow.items():
                    nv = (row.get(j, 0) - f * v) % p
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
            return row
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                return row
            a = prow[c]
            b = row[c]
            g = math.gcd(a, b)
            a //= g
            b //= g
            new = {j: a * v for j, v in row.items()}
            for j, v in prow.items():
                nv = new.get(j, 0) - b * v
                if nv:
                    new[j] = nv
                else:
                    new.pop(j, None)
            row = _primitive(new)
        return row

    def add(self, row: dict) -> int | None:
        """Insert a row; return its pivot column, or None if it was dependent."""
        row = self.reduce(row)
        if not row:
            return None
        c = min(row)
        if self.p is not None:
            inv = pow(row[c], -1, self.p)
            row = {j: v * inv % self.p for j, v in row.items()}
        elif row[c] < 0:
            row = {j: -v for j, v in row.items()}
        self.pivots[c] = row
        self.order.append(c)
        return c

    @property
    def rank(self):
        return len(self.pivots)

    def reduced_rows(self) -> dict[int, dict]:
        """Fully reduced echelon form (pivot entries 1, zeros above pivots)."""
        cols = sorted(self.pivots)
        p = self.p
        red: dict[int, dict] = {}
        for c in reversed(cols):
            row = dict(self.pivots[c])
            if p is not None:
                for j in [j for j in row if j != c and j in red]:
                    f = row.get(j)
                    if not f:
                        continue
                    for k, v in red[j].items():
                        nv = (row.get(k, 0) - f * v) % p
                        if nv:
                            row[k] = nv
                        else:
                            row.pop(k, None)
                red[c] = row
            else:
                # work with Fractions for the back substitution
                frow = {j: Fraction(v, row[c]) for j, v in row.items()}
                for j in sorted(j for j in frow if j != c and j in red):
                    f = frow.get(j)
                    if not f:
                        continue
                    for k, v in red[j].items():
                        nv = frow.get(k, 0) - f * v
                        if nv:
                            frow[k] = nv
                        else:
                            frow.pop(k, None)
                red[c] = frow
        return red


def _rows_for(m: SparseMatrix) -> list[dict]:
    _check_uniform(m)
    rows = m.row_dicts()
    if m.field.characteristic == 0:
        return _integer_rows(rows)
    return rows


def rank(m: SparseMatrix) -> int:
    """Rank over the matrix's field."""
    if m.is_zero():
        return 0
    # eliminate along the shorter side; rank(m) == rank(m.T)
    src = m if m.rows <= m.cols else m.transpose()
    ech = _Echelon(m.field)
    for row in _rows_for(src):
        if row:
            ech.add(row)
    return ech.rank


def rref(m: SparseMatrix) -> tuple[list[int], SparseMatrix]:
    """Reduced row echelon form; returns (pivot columns, matrix of pivot rows)."""
    ech = _Echelon(m.field)
    for row in _rows_for(m):
        if row:
            ech.add(row)
    red = ech.reduced_rows()
    piv = sorted(red)
    f = m.field
    rd = {i: {j: f.coerce(v) for j, v in red[c].items()} for i, c in enumerate(piv)}
    return piv, SparseMatrix._raw(len(piv), m.cols, f, rd)


def kernel_basis(m: SparseMatrix) -> SparseMatrix:
    """Columns form a basis of the null space {x : m x = 0}."""
    piv, r = rref(m)
    f = m.field
    pivset = set(piv)
    free = [j for j in range(m.cols) if j not in pivset]
    ents = []
    prows = r.row_dicts()
    # column index of free var k in output: position in `free`
    free_pos = {j: k for k, j in enumerate(free)}
    for k, j in enumerate(free):
        ents.append((j, k, f.one))
    for i, c in enumerate(piv):
        for j, v in prows[i].items():
            if j != c:
                ents.append((c, free_pos[j], -v))
    return SparseMatrix(m.cols, len(free), ents, f)


def image_basis(m: SparseMatrix) -> SparseMatrix:
    """Columns form a basis of the column space (the reduced rows of m.T, transposed)."""
    _, r = rref(m.transpose())
    return r.transpose()


def solve_feasible(a: SparseMatrix, b) -> list | None:
    """Some exact x with a @ x == b, or None when the system is inconsistent.

    Free variables are set to zero, so the answer is reproducible.
    """
    f = a.field
    if isinstance(b, SparseMatrix):
        a._check_field(b)
        if b.cols != 1:
            raise ShapeError("right-hand side must be a column")
        bvals = b.column_values(0)
    else:
        bvals = [f.coerce(v) for v in b]
    if len(bvals) != a.rows:
        raise ShapeError(f"rhs length {len(bvals)} != rows {a.rows}")
    n = a.cols
    aug_rows = []
    for i, row in enumerate(a.row_dicts()):
        d = dict(row)
        if bvals[i] != 0:
            d[n] = bvals[i]
        aug_rows.append(d)
    if f.characteristic == 0:
        aug_rows = _integer_rows(aug_rows)
    ech = _Echelon(f)
    for row in aug_rows:
        if row:
            if ech.add(row) == n:
                return None
    red = ech.reduced_rows()
    x = [f.zero] * n
    for c, row in red.items():
        x[c] = f.coerce(row.get(n, 0))
    return x


def solve_many(a: SparseMatrix, bs: SparseMatrix) -> SparseMatrix | None:
    """Solve a @ X == B for all columns of B at once; None if any column is inconsistent.

    One elimination of [a | B]; column j of X equals solve_feasible(a, B[:, j]).
    """
    a._check_field(bs)
    if bs.rows != a.rows:
        raise ShapeError(f"rhs has {bs.rows} rows, a has {a.rows}")
    f = a.field
    n = a.cols
    brows = bs.row_dicts()
    aug_rows = []
    for i, row in enumerate(a.row_dicts()):
        d = dict(row)
        for j, v in brows[i].items():
            d[n + j] = v
        aug_rows.append(d)
    if f.characteristic == 0:
        aug_rows = _integer_rows(aug_rows)
    ech = _Echelon(f)
    for row in aug_rows:
        if row:
            c = ech.add(row)
            if c is not None and c >= n:
                return None
    red = ech.reduced_rows()
    ents = []
    for c, row in red.items():
        for j, v in row.items():
            if j >= n:
                v = f.coerce(v)
                if v != 0:
                    ents.append((c, j - n, v))
    return SparseMatrix(n, bs.cols, ents, f)


class QuotientSpace:
    """Coordinates on V / U for a subspace U of k^n spanned by given vectors.

    The complement basis is the set of standard vectors off the pivot
    columns of U's reduced echelon form.
    """

    def __init__(self, n: int, spanning: SparseMatrix, field: Field):
        if spanning.rows != n:
            raise ShapeError("spanning vectors must be columns of length n")
        self.n = n
        self.field = field
        piv, r = rref(spanning.transpose()) if spanning.cols else ([], SparseMatrix.zero(0, n, field))
        self.pivots = piv
        self._rows = dict(zip(piv, r.row_dicts()))
        pivset = set(piv)
        self.basis = [j for j in range(n) if j not in pivset]
        self._pos = {j: k for k, j in enumerate(self.basis)}

    @property
    def dim(self):
        return len(self.basis)

    def reduce(self, vec: dict[int, object]) -> dict[int, object]:
        """Quotient coordinates of a sparse vector."""
        f = self.field
        v = dict(vec)
        for c in sorted(c for c in self._rows):
            a = v.get(c)
            if not a:
                continue
            for j, w in self._rows[c].items():
                nv = f.coerce(v.get(j, 0) - a * w)
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
        return {self._pos[j]: x for j, x in v.items() if x != 0}
