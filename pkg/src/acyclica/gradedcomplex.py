"""Bigraded complexes of finite-dimensional vector spaces.

A complex has terms indexed by (position, internal degree) and differentials
of bidegree (+1, 0), so every computation splits into independent
internal-degree slices.  Only a finite ``window`` of bidegrees is stored.
``support`` records what is known outside the window: a bound of ``None``
means the complex may continue in that direction, so cohomology next to that
edge of the window is flagged and never asserted on.

Sign conventions (used everywhere in the package):

* tensor:  d(u (x) v) = du (x) v + (-1)^|u| u (x) dv
* Hom:     d(f) = d_Y f - (-1)^|f| f d_X
* dual:    plain transpose, positions and internal degrees negated
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from ._parallel import pmap
from .exactla import (
    DEFAULT_FIELD,
    Field,
    FieldMismatchError,
    ShapeError,
    SparseMatrix,
    _label_from_json,
    _label_json,
    hstack,
    kernel_basis,
    parse_field,
    rank,
    solve_feasible,
)

Bidegree = tuple[int, int]


class CompositionNonzeroError(ValueError):
    def __init__(self, bidegree):
        super().__init__(f"d o d != 0 starting at bidegree {bidegree}")
        self.bidegree = bidegree


class InhomogeneousError(ValueError):
    pass


class UnboundedComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    pos_lo: int
    pos_hi: int
    deg_lo: int
    deg_hi: int

    def positions(self) -> range:
        return range(self.pos_lo, self.pos_hi + 1)

    def degrees(self) -> range:
        return range(self.deg_lo, self.deg_hi + 1)

    def __contains__(self, b: Bidegree) -> bool:
        n, t = b
        return self.pos_lo <= n <= self.pos_hi and self.deg_lo <= t <= self.deg_hi

    def negated(self) -> "Window":
        return Window(-self.pos_hi, -self.pos_lo, -self.deg_hi, -self.deg_lo)

    def to_json_obj(self):
        return {"pos": [self.pos_lo, self.pos_hi], "deg": [self.deg_lo, self.deg_hi]}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(obj["pos"][0], obj["pos"][1], obj["deg"][0], obj["deg"][1])


# (pos_lo, pos_hi, deg_lo, deg_hi); None = unbounded in that direction
Support = tuple


def _neg(b):
    return None if b is None else -b


def _add(a, b):
    return None if a is None or b is None else a + b


def _sub(a, b):
    return None if a is None or b is None else a - b


@dataclass(frozen=True)
class BigradedTerm:
    position: int
    slices: Mapping[int, tuple[int, tuple]]  # internal degree -> (dim, labels)


class BigradedComplex:
    """Validated, immutable bigraded complex.  Build with :func:`build_complex`."""

    def __init__(self, field: Field, window: Window, dims, labels, diffs, support, incomplete):
        self.field = field
        self.window = window
        self._dims: dict[Bidegree, int] = dims
        self._labels: dict[Bidegree, tuple] = labels
        self._diffs: dict[Bidegree, SparseMatrix] = diffs
        self.support = support
        self.incomplete = frozenset(incomplete)
        self._ranks: dict[Bidegree, int] = {}

    # access --------------------------------------------------------------

    def dim(self, n: int, t: int) -> int:
        return self._dims.get((n, t), 0)

    def labels(self, n: int, t: int) -> tuple:
        return self._labels.get((n, t), ())

    def d(self, n: int, t: int) -> SparseMatrix:
        """Differential from (n, t) to (n + 1, t)."""
        m = self._diffs.get((n, t))
        if m is None:
            return SparseMatrix.zero(self.dim(n + 1, t), self.dim(n, t), self.field)
        return m

    def has_d(self, n, t) -> bool:
        return (n, t) in self._diffs

    def bidegrees(self) -> list[Bidegree]:
        return sorted(b for b, k in self._dims.items() if k)

    def positions(self) -> range:
        return self.window.positions()

    def degrees(self) -> range:
        return self.window.degrees()

    @property
    def terms(self) -> dict[int, BigradedTerm]:
        out: dict[int, dict] = {}
        for (n, t), k in sorted(self._dims.items()):
            if k:
                out.setdefault(n, {})[t] = (k, self.labels(n, t))
        return {n: BigradedTerm(n, s) for n, s in out.items()}

    def state(self, n: int, t: int) -> str:
        """'known', 'zero' (outside the window, outside the support) or 'unknown'."""
        if (n, t) in self.window:
            return "known"
        plo, phi, dlo, dhi = self.support
        if (plo is not None and n < plo) or (phi is not None and n > phi):
            return "zero"
        if (dlo is not None and t < dlo) or (dhi is not None and t > dhi):
            return "zero"
        return "unknown"

    def is_trusted(self, n, t) -> bool:
        """Whether H at (n, t) is fully determined by the stored data."""
        for k in (n - 1, n, n + 1):
            if self.state(k, t) == "unknown" or (k, t) in self.incomplete:
                return False
        return True

    def is_position_bounded(self) -> bool:
        plo, phi, _, _ = self.support
        return (plo is not None and phi is not None
                and self.window.pos_lo <= plo and phi <= self.window.pos_hi)

    def rank_d(self, n: int, t: int) -> int:
        if (n, t) not in self._ranks:
            self._ranks[(n, t)] = rank(self.d(n, t)) if (n, t) in self._diffs else 0
        return self._ranks[(n, t)]

    def total_dim(self) -> int:
        return sum(self._dims.values())

    def __repr__(self):
        w = self.window
        return (f"BigradedComplex(pos {w.pos_lo}..{w.pos_hi}, deg {w.deg_lo}..{w.deg_hi}, "
                f"total dim {self.total_dim()}, {self.field.name})")

    # serialization -------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "schema": "acyclica.complex/1",
            "field": self.field.name,
            "window": self.window.to_json_obj(),
            "support": list(self.support),
            "incomplete": sorted([list(b) for b in self.incomplete]),
            "terms": [
                {"position": n, "internal_degree": t, "dim": self.dim(n, t),
                 "labels": [_label_json(x) for x in self.labels(n, t)]}
                for n, t in self.bidegrees()
            ],
            "differentials": [
                {"position": n, "internal_degree": t, "matrix": m.to_json_obj()}
                for (n, t), m in sorted(self._diffs.items()) if not m.is_zero()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> "BigradedComplex":
        f = parse_field(obj["field"])
        terms = {(e["position"], e["internal_degree"]): [_label_from_json(x) for x in e["labels"]] or e["dim"]
                 for e in obj["terms"]}
        diffs = {(e["position"], e["internal_degree"]): SparseMatrix.from_json_obj(e["matrix"])
                 for e in obj["differentials"]}
        return build_complex(terms, diffs, Window.from_json_obj(obj["window"]), f,
                             support=tuple(obj["support"]), incomplete=[tuple(b) for b in obj["incomplete"]])

    @classmethod
    def loads(cls, s: str) -> "BigradedComplex":
        return cls.from_json_obj(json.loads(s))


def build_complex(terms: Mapping, differentials: Mapping, window: Window,
                  field: Field = DEFAULT_FIELD, support: Support | None = None,
                  incomplete: Iterable[Bidegree] = (), check: bool = True) -> BigradedComplex:
    """Validate and assemble a complex.

    ``terms`` maps (n, t) to a dimension or a list of basis labels.
    ``differentials`` maps (n, t) -- or ((n, t), (n + 1, t)) -- to the matrix
    from (n, t) to (n + 1, t).  ``support=None`` declares that nothing lives
    outside the window.
    """
    dims: dict[Bidegree, int] = {}
    labels: dict[Bidegree, tuple] = {}
    for b, v in terms.items():
        b = (int(b[0]), int(b[1]))
        if b not in window:
            raise ShapeError(f"term {b} outside window")
        if isinstance(v, int):
            k, lab = v, tuple(range(v))
        else:
            lab = tuple(v)
            k = len(lab)
        if k:
            dims[b] = k
            labels[b] = lab
    diffs: dict[Bidegree, SparseMatrix] = {}
    for key, m in differentials.items():
        if isinstance(key[0], tuple):
            (n, t), (n2, t2) = key
            if n2 != n + 1 or t2 != t:
                raise InhomogeneousError(f"differential {key} is not of bidegree (+1, 0)")
        else:
            n, t = key
        if m.field != field:
            raise FieldMismatchError(f"differential at {(n, t)} over {m.field.name}, complex over {field.name}")
        if (n, t) not in window or (n + 1, t) not in window:
            if m.is_zero():
                continue
            raise ShapeError(f"differential at {(n, t)} leaves the window")
        shape = (dims.get((n + 1, t), 0), dims.get((n, t), 0))
        if m.shape != shape:
            raise ShapeError(f"differential at {(n, t)} has shape {m.shape}, expected {shape}")
        if not m.is_zero():
            diffs[(n, t)] = m
    if support is None:
        support = (window.pos_lo, window.pos_hi, window.deg_lo, window.deg_hi)
    c = BigradedComplex(field, window, dims, labels, diffs, tuple(support), incomplete)
    if check:
        for (n, t), m in diffs.items():
            nxt = diffs.get((n + 1, t))
            if nxt is not None and not (nxt @ m).is_zero():
                raise CompositionNonzeroError((n, t))
    return c


def zero_differential_complex(dims: Mapping[Bidegree, int | Sequence], field: Field = DEFAULT_FIELD,
                              window: Window | None = None) -> BigradedComplex:
    if window is None:
        ns = [b[0] for b in dims] or [0]
        ts = [b[1] for b in dims] or [0]
        window = Window(min(ns), max(ns), min(ts), max(ts))
    return build_complex(dims, {}, window, field)


def shift(x: BigradedComplex, dpos: int, ddeg: int) -> BigradedComplex:
    """Relabel bidegrees (n, t) -> (n + dpos, t + ddeg); matrices unchanged."""
    w = x.window
    plo, phi, dlo, dhi = x.support
    terms = {(n + dpos, t + ddeg): x.labels(n, t) for n, t in x.bidegrees()}
    diffs = {(n + dpos, t + ddeg): m for (n, t), m in x._diffs.items()}
    return build_complex(terms, diffs, Window(w.pos_lo + dpos, w.pos_hi + dpos, w.deg_lo + ddeg, w.deg_hi + ddeg),
                         x.field, support=(_add(plo, dpos), _add(phi, dpos), _add(dlo, ddeg), _add(dhi, ddeg)),
                         incomplete=[(n + dpos, t + ddeg) for n, t in x.incomplete], check=False)


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True)
class CohomologyTable:
    window: Window
    dims: Mapping[Bidegree, int]
    flagged: frozenset = dc_field(default_factory=frozenset)

    def get(self, n: int, t: int) -> int:
        return self.dims.get((n, t), 0)

    def trusted(self) -> dict[Bidegree, int]:
        return {b: k for b, k in self.dims.items() if b not in self.flagged}

    def nonzero(self, include_flagged: bool = False) -> dict[Bidegree, int]:
        src = self.dims if include_flagged else self.trusted()
        return {b: k for b, k in sorted(src.items()) if k}

    def total(self, n: int | None = None, include_flagged: bool = False) -> int:
        return sum(k for (p, _), k in self.nonzero(include_flagged).items() if n is None or p == n)

    def by_position(self, include_flagged: bool = False) -> dict[int, int]:
        out: dict[int, int] = {}
        for (n, _), k in self.nonzero(include_flagged).items():
            out[n] = out.get(n, 0) + k
        return out

    def is_zero(self) -> bool:
        return not self.nonzero()

    def rows(self) -> list[tuple[int, int, int, bool]]:
        return [(n, t, self.get(n, t), (n, t) in self.flagged)
                for n in self.window.positions() for t in self.window.degrees()]

    def to_json_obj(self):
        return {
            "window": self.window.to_json_obj(),
            "rows": [{"position": n, "internal_degree": t, "dim": k, "boundary_flag": f}
                     for n, t, k, f in self.rows()],
        }

    @classmethod
    def from_json_obj(cls, obj):
        dims = {(r["position"], r["internal_degree"]): r["dim"] for r in obj["rows"]}
        flagged = frozenset((r["position"], r["internal_degree"]) for r in obj["rows"] if r["boundary_flag"])
        return cls(Window.from_json_obj(obj["window"]), dims, flagged)

    def to_csv(self) -> str:
        lines = ["position,internal_degree,dim,boundary_flag"]
        lines += [f"{n},{t},{k},{int(f)}" for n, t, k, f in self.rows()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, window: Window | None = None) -> "CohomologyTable":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        dims = {(int(n), int(t)): int(k) for n, t, k, _ in rows}
        flagged = frozenset((int(n), int(t)) for n, t, _, f in rows if f.strip() in ("1", "True", "true"))
        if window is None:
            ns = [b[0] for b in dims]
            ts = [b[1] for b in dims]
            window = Window(min(ns), max(ns), min(ts), max(ts))
        return cls(window, dims, flagged)


def _slice_cohomology(args):
    c, t = args
    out = {}
    for n in c.window.positions():
        k = c.dim(n, t)
        if not k:
            out[n] = 0
            continue
        out[n] = k - c.rank_d(n, t) - c.rank_d(n - 1, t)
    return t, out


def cohomology(c: BigradedComplex) -> CohomologyTable:
    """dim ker - dim im at every bidegree of the window, flagged near open edges."""
    dims: dict[Bidegree, int] = {}
    flagged = set()
    for t, col in pmap(_slice_cohomology, [(c, t) for t in c.window.degrees()]):
        for n, k in col.items():
            dims[(n, t)] = k
            if not c.is_trusted(n, t):
                flagged.add((n, t))
    return CohomologyTable(c.window, dims, frozenset(flagged))


# ---------------------------------------------------------------------------
# chain maps


class ChainMap:
    """Degree (0, 0) map between complexes, one matrix per bidegree."""

    def __init__(self, source: BigradedComplex, target: BigradedComplex, blocks: Mapping[Bidegree, SparseMatrix],
                 check: bool = True):
        if source.field != target.field:
            raise FieldMismatchError("chain map across fields")
        self.source = source
        self.target = target
        self.blocks = dict(blocks)
        for (n, t), m in self.blocks.items():
            if m.shape != (target.dim(n, t), source.dim(n, t)):
                raise ShapeError(f"chain map block at {(n, t)} has shape {m.shape}")
        if check:
            bad = self.failures()
            if bad:
                raise ValueError(f"chain map does not commute with differentials at {bad[0]}")

    def f(self, n, t) -> SparseMatrix:
        m = self.blocks.get((n, t))
        if m is None:
            return SparseMatrix.zero(self.target.dim(n, t), self.source.dim(n, t), self.source.field)
        return m

    def failures(self) -> list[Bidegree]:
        bad = []
        s, g = self.source, self.target
        for n in s.window.positions():
            for t in s.window.degrees():
                if (n + 1, t) not in s.window or (n, t) not in g.window or (n + 1, t) not in g.window:
                    continue
                if g.d(n, t) @ self.f(n, t) != self.f(n + 1, t) @ s.d(n, t):
                    bad.append((n, t))
        return bad

    @classmethod
    def from_labels(cls, source: BigradedComplex, target: BigradedComplex, check: bool = True) -> "ChainMap":
        """Send each basis vector to the target basis vector with the same label (or to 0)."""
        blocks = {}
        for n, t in source.bidegrees():
            if (n, t) not in target.window:
                continue
            idx = {lab: i for i, lab in enumerate(target.labels(n, t))}
            ents = [(idx[lab], j, 1) for j, lab in enumerate(source.labels(n, t)) if lab in idx]
            blocks[(n, t)] = SparseMatrix(target.dim(n, t), source.dim(n, t), ents, source.field)
        return cls(source, target, blocks, check)

    def induced_rank(self, n: int, t: int) -> int:
        """Rank of the induced map H^n(source) -> H^n(target) in slice t."""
        s, g = self.source, self.target
        k = s.dim(n, t)
        if not k or not g.dim(n, t):
            return 0
        z = kernel_basis(s.d(n, t))
        if not z.cols:
            return 0
        fz = self.f(n, t) @ z
        b = g.d(n - 1, t)
        if b.cols:
            return rank(hstack([b, fz])) - rank(b)
        return rank(fz)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other."""
        blocks = {b: self.f(*b) @ other.f(*b) for b in other.source.bidegrees()
                  if b in self.source.window and b in self.target.window}
        return ChainMap(other.source, self.target, blocks)


# ---------------------------------------------------------------------------
# tensor, Hom, dual


def _axis_candidates(n, w1, s1, w2, s2, hom: bool):
    """Range of first-factor indices that can contribute to output index n,
    and whether that range is covered by both windows.

    Tensor pairs (p, n - p); Hom pairs (p, p + n).
    """
    lo1, hi1 = s1
    lo2, hi2 = s2
    if hom:
        lo_b, hi_b = _sub(lo2, n), _sub(hi2, n)
    else:
        lo_b, hi_b = _sub(n, hi2), _sub(n, lo2)
    lo = lo1 if lo_b is None else (lo_b if lo1 is None else max(lo1, lo_b))
    hi = hi1 if hi_b is None else (hi_b if hi1 is None else min(hi1, hi_b))
    if lo is not None and hi is not None and lo > hi:
        return True
    if lo is None or hi is None:
        return False
    if lo < w1[0] or hi > w1[1]:
        return False
    qs = (lo + n, hi + n) if hom else (n - hi, n - lo)
    return w2[0] <= qs[0] and qs[1] <= w2[1]


def _pair_complete(x, y, n, t, hom):
    wx, wy = x.window, y.window
    sx, sy = x.support, y.support
    pos_ok = _axis_candidates(n, (wx.pos_lo, wx.pos_hi), (sx[0], sx[1]), (wy.pos_lo, wy.pos_hi), (sy[0], sy[1]), hom)
    deg_ok = _axis_candidates(t, (wx.deg_lo, wx.deg_hi), (sx[2], sx[3]), (wy.deg_lo, wy.deg_hi), (sy[2], sy[3]), hom)
    return pos_ok and deg_ok


def tensor(x: BigradedComplex, y: BigradedComplex) -> BigradedComplex:
    """Graded tensor product over the field, Koszul sign rule."""
    if x.field != y.field:
        raise FieldMismatchError("tensor across fields")
    f = x.field
    wx, wy = x.window, y.window
    w = Window(wx.pos_lo + wy.pos_lo, wx.pos_hi + wy.pos_hi, wx.deg_lo + wy.deg_lo, wx.deg_hi + wy.deg_hi)
    sx, sy = x.support, y.support
    support = tuple(_add(a, b) for a, b in zip(sx, sy))

    # basis of each output bidegree: list of blocks ((p, s), (q, u), offset)
    layout: dict[Bidegree, list] = {}
    xb = x.bidegrees()
    yb = y.bidegrees()
    for p, s in xb:
        for q, u in yb:
            layout.setdefault((p + q, s + u), []).append(((p, s), (q, u)))
    terms = {}
    offsets: dict[Bidegree, dict] = {}
    for b, blocks in layout.items():
        blocks.sort()
        off = 0
        labs = []
        offsets[b] = {}
        for bx, by in blocks:
            offsets[b][(bx, by)] = off
            labs.extend((lx, ly) for lx in x.labels(*bx) for ly in y.labels(*by))
            off += x.dim(*bx) * y.dim(*by)
        terms[b] = labs
    diffs = {}
    for (n, t), blocks in layout.items():
        if (n + 1, t) not in layout:
            continue
        ents = []
        tgt_off = offsets[(n + 1, t)]
        for (bx, by) in blocks:
            src0 = offsets[(n, t)][(bx, by)]
            (p, s), (q, u) = bx, by
            dy_ = y.dim(q, u)
            # dx (x) 1
            key = ((p + 1, s), by)
            if key in tgt_off and x.has_d(p, s):
                t0 = tgt_off[key]
                for r, c, v in x.d(p, s).entries:
                    for j in range(dy_):
                        ents.append((t0 + r * dy_ + j, src0 + c * dy_ + j, v))
            # (-1)^p 1 (x) dy
            key = (bx, (q + 1, u))
            if key in tgt_off and y.has_d(q, u):
                t0 = tgt_off[key]
                dy_next = y.dim(q + 1, u)
                sign = -1 if p % 2 else 1
                for i in range(x.dim(p, s)):
                    for r, c, v in y.d(q, u).entries:
                        ents.append((t0 + i * dy_next + r, src0 + i * dy_ + c, sign * v))
        if ents:
            diffs[(n, t)] = SparseMatrix(len(terms[(n + 1, t)]), len(terms[(n, t)]), ents, f)
    incomplete = set()
    for n in w.positions():
        for t in w.degrees():
            if not _pair_complete(x, y, n, t, hom=False):
                incomplete.add((n, t))
                continue
            for (bx, by) in layout.get((n, t), ()):
                if bx in x.incomplete or by in y.incomplete:
                    incomplete.add((n, t))
    return build_complex(terms, diffs, w, f, support=support, incomplete=incomplete, check=False)


def hom_complex(x: BigradedComplex, y: BigradedComplex) -> BigradedComplex:
    """Graded Hom over the field.

    Position n, internal degree t collects Hom(X^p_s, Y^{p+n}_{s+t}).
    A basis vector is the elementary map sending source basis vector i to
    target basis vector j; its label is ``("hom", label_i, label_j)``.
    """
    if x.field != y.field:
        raise FieldMismatchError("Hom across fields")
    f = x.field
    wx, wy = x.window, y.window
    w = Window(wy.pos_lo - wx.pos_hi, wy.pos_hi - wx.pos_lo, wy.deg_lo - wx.deg_hi, wy.deg_hi - wx.deg_lo)
    sx, sy = x.support, y.support
    support = (_sub(sy[0], sx[1]), _sub(sy[1], sx[0]), _sub(sy[2], sx[3]), _sub(sy[3], sx[2]))

    layout: dict[Bidegree, list] = {}
    for p, s in x.bidegrees():
        for q, u in y.bidegrees():
            layout.setdefault((q - p, u - s), []).append(((p, s), (q, u)))
    terms = {}
    offsets: dict[Bidegree, dict] = {}
    for b, blocks in layout.items():
        blocks.sort()
        off = 0
        labs = []
        offsets[b] = {}
        for bx, by in blocks:
            offsets[b][bx] = off
            labs.extend(("hom", lx, ly) for lx in x.labels(*bx) for ly in y.labels(*by))
            off += x.dim(*bx) * y.dim(*by)
        terms[b] = labs
    diffs = {}
    for (n, t), blocks in layout.items():
        if (n + 1, t) not in layout:
            continue
        tgt = offsets[(n + 1, t)]
        sign = 1 if n % 2 else -1  # -(-1)^n
        ents = []
        for (bx, by) in blocks:
            (p, s), (q, u) = bx, by
            src0 = offsets[(n, t)][bx]
            dyd = y.dim(q, u)
            # d_Y o E_{ji}: same source block, target shifts to q + 1
            if bx in tgt and y.has_d(q, u):
                t0 = tgt[bx]
                dyn = y.dim(q + 1, u)
                for i in range(x.dim(p, s)):
                    for r, c, v in y.d(q, u).entries:
                        ents.append((t0 + i * dyn + r, src0 + i * dyd + c, v))
            # E_{ji} o d_X: source block moves to p - 1
            bprev = (p - 1, s)
            if bprev in tgt and x.has_d(p - 1, s):
                t0 = tgt[bprev]
                for r, c, v in x.d(p - 1, s).entries:
                    # E_{j r} d_X = sum_c d_X[r, c] E_{j c}
                    for j in range(dyd):
                        ents.append((t0 + c * dyd + j, src0 + r * dyd + j, sign * v))
        if ents:
            diffs[(n, t)] = SparseMatrix(len(terms[(n + 1, t)]), len(terms[(n, t)]), ents, f)
    incomplete = set()
    for n in w.positions():
        for t in w.degrees():
            if not _pair_complete(x, y, n, t, hom=True):
                incomplete.add((n, t))
                continue
            for (bx, by) in layout.get((n, t), ()):
                if bx in x.incomplete or by in y.incomplete:
                    incomplete.add((n, t))
    return build_complex(terms, diffs, w, f, support=support, incomplete=incomplete, check=False)


def _dual_label(lab):
    if isinstance(lab, tuple) and len(lab) == 2 and lab[0] == "*":
        return lab[1]
    return ("*", lab)


def dualize(x: BigradedComplex) -> BigradedComplex:
    """Graded vector-space dual: (n, t) -> (-n, -t), differentials transposed."""
    plo, phi, dlo, dhi = x.support
    terms = {(-n, -t): [_dual_label(l) for l in x.labels(n, t)] for n, t in x.bidegrees()}
    diffs = {(-n - 1, -t): m.transpose().with_labels(None, None) for (n, t), m in x._diffs.items()}
    return build_complex(terms, diffs, x.window.negated(), x.field,
                         support=(_neg(phi), _neg(plo), _neg(dhi), _neg(dlo)),
                         incomplete=[(-n, -t) for n, t in x.incomplete], check=False)


# ---------------------------------------------------------------------------
# contracting homotopies


def _vec_index(r, c, ncols):
    return r * ncols + c


@lru_cache(maxsize=4096)
def equivariant_basis(src_actions: tuple, tgt_actions: tuple, src_dim: int, tgt_dim: int, field: Field) -> tuple:
    """Basis of {h : h A_i = B_i h for all i} as a tuple of tgt x src matrices."""
    if not src_actions:
        return tuple(SparseMatrix(tgt_dim, src_dim, [(r, c, 1)], field)
                     for r in range(tgt_dim) for c in range(src_dim))
    rows: dict[tuple, dict[int, object]] = {}
    for key, (a, b) in enumerate(zip(src_actions, tgt_actions)):
        # (h A)[r, c] = sum_k h[r, k] A[k, c]
        for k, c, v in a.entries:
            for r in range(tgt_dim):
                row = rows.setdefault((key, r, c), {})
                idx = r * src_dim + k
                row[idx] = row.get(idx, 0) + v
        # -(B h)[r, c] = -sum_k B[r, k] h[k, c]
        for r, k, v in b.entries:
            for c in range(src_dim):
                row = rows.setdefault((key, r, c), {})
                idx = k * src_dim + c
                row[idx] = row.get(idx, 0) - v
    ents = []
    for i, (_, row) in enumerate(sorted(rows.items())):
        for j, v in row.items():
            ents.append((i, j, v))
    cons = SparseMatrix(len(rows), tgt_dim * src_dim, ents, field)
    ker = kernel_basis(cons)
    out = []
    cols: dict[int, list] = {}
    for r, c, v in ker.entries:
        cols.setdefault(c, []).append((r // src_dim, r % src_dim, v))
    for j in range(ker.cols):
        out.append(SparseMatrix(tgt_dim, src_dim, cols.get(j, []), field))
    return tuple(out)


def _actions_at(equivariance, n, t):
    return tuple(act[(n, t)] for act in equivariance)


def _homotopy_slice(args):
    x, t, equivariance = args
    f = x.field
    ns = [n for n in x.window.positions() if x.dim(n, t)]
    if not ns:
        return t, {}
    # unknown blocks h^n : X^n -> X^{n-1}
    blocks = []
    for n in ns:
        if x.dim(n - 1, t):
            if equivariance:
                basis = equivariant_basis(_actions_at(equivariance, n, t), _actions_at(equivariance, n - 1, t),
                                          x.dim(n, t), x.dim(n - 1, t), f)
            else:
                basis = equivariant_basis((), (), x.dim(n, t), x.dim(n - 1, t), f)
            blocks.append((n, basis))
    # equation rows: for each n, entries of d h^n + h^{n+1} d  on X^n
    eq_off = {}
    off = 0
    for n in ns:
        eq_off[n] = off
        off += x.dim(n, t) ** 2
    ents = []
    col = 0
    col_of = []
    for n, basis in blocks:
        dn = x.dim(n, t)
        dm = x.dim(n - 1, t)
        dprev = x.d(n - 1, t)  # X^{n-1} -> X^n
        for b in basis:
            # contributes d^{n-1} b to equation n (X^n -> X^n)
            m1 = dprev @ b
            for r, c, v in m1.entries:
                ents.append((eq_off[n] + r * dn + c, col, v))
            # contributes b d^{n-1} to equation n-1 (X^{n-1} -> X^{n-1})
            m2 = b @ dprev
            for r, c, v in m2.entries:
                ents.append((eq_off[n - 1] + r * dm + c, col, v))
            col_of.append((n, b))
            col += 1
    a = SparseMatrix(off, col, ents, f)
    rhs = [0] * off
    for n in ns:
        dn = x.dim(n, t)
        for i in range(dn):
            rhs[eq_off[n] + i * dn + i] = 1
    sol = solve_feasible(a, rhs)
    if sol is None:
        return t, None
    h: dict[int, SparseMatrix] = {}
    for (n, b), coef in zip(col_of, sol):
        if coef:
            h[n] = h[n] + b.scale(coef) if n in h else b.scale(coef)
    for n, _ in blocks:
        if n not in h:
            h[n] = SparseMatrix.zero(x.dim(n - 1, t), x.dim(n, t), f)
    return t, h


def null_homotopy(x: BigradedComplex, equivariance: Sequence[Mapping[Bidegree, SparseMatrix]] | None = None):
    """Contracting homotopy h with dh + hd = id, or None if none exists.

    ``equivariance`` is a list of actions, each a map bidegree -> square
    matrix acting on that term; h must commute with every action.  The
    result maps (n, t) to the block X^n_t -> X^{n-1}_t.
    """
    if not x.is_position_bounded() or x.incomplete:
        raise UnboundedComplexError("null_homotopy needs a complex bounded inside its window")
    equivariance = list(equivariance or [])
    for act in equivariance:
        for b in x.bidegrees():
            if b not in act:
                raise ValueError(f"action missing at {b}")
            if act[b].shape != (x.dim(*b), x.dim(*b)):
                raise ShapeError(f"action at {b} has shape {act[b].shape}")
    out: dict[Bidegree, SparseMatrix] = {}
    for t, h in pmap(_homotopy_slice, [(x, t, equivariance) for t in x.window.degrees()]):
        if h is None:
            return None
        for n, m in h.items():
            out[(n, t)] = m
    return out


def check_homotopy(x: BigradedComplex, h: Mapping[Bidegree, SparseMatrix]) -> bool:
    f = x.field
    for n, t in x.bidegrees():
        k = x.dim(n, t)
        hn = h.get((n, t), SparseMatrix.zero(x.dim(n - 1, t), k, f))
        hn1 = h.get((n + 1, t), SparseMatrix.zero(k, x.dim(n + 1, t), f))
        lhs = x.d(n - 1, t) @ hn + hn1 @ x.d(n, t)
        if lhs != SparseMatrix.identity(k, f):
            return False
    return True
