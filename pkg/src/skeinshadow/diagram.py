"""Morse-form colored framed tangle diagrams and their evaluation.

A diagram is an ordered list of rows, bottom to top; each row applies one
generator at a slot position, identities elsewhere.  Generators:

* ``cup``        creation, left side ascending   (coev:  1 -> V x V*)
* ``cup_tilde``  creation, right side ascending  (coev~: 1 -> V* x V)
* ``cap``        annihilation of (down, up)      (ev:   V* x V -> 1)
* ``cap_tilde``  annihilation of (up, down)      (ev~:  V x V* -> 1)
* ``pos_crossing`` / ``neg_crossing`` braid the two adjacent slots.

Strand orientations and component ids are derived, never stored; framing is
blackboard (kinks count).  Down-oriented slots carry the dual module of the
component color.  Closed diagrams evaluate to scalars; cutting one simple
projective component open yields the endomorphism it represents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .qarith import Poly, RootData
from .repcat import WeightModule, dual, simple_module
from .ribbon import RibbonOps

__all__ = [
    "Row",
    "MorseDiagram",
    "DiagramError",
    "DiagramInfo",
    "LinkingData",
    "parse",
    "parse_dsl",
    "linking",
    "cable",
    "rt_evaluate",
    "cut_and_evaluate",
    "f_invariant",
]

GENS = ("cup", "cup_tilde", "cap", "cap_tilde", "pos_crossing", "neg_crossing")
FORMAT_TAG = "morse-diagram/1"


class DiagramError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


@dataclass(frozen=True)
class Row:
    gen: str
    at: int


@dataclass(frozen=True)
class MorseDiagram:
    rows: tuple[Row, ...]

    @staticmethod
    def make(rows: Iterable[Row | tuple]) -> "MorseDiagram":
        out = []
        for r in rows:
            out.append(r if isinstance(r, Row) else Row(r[0], int(r[1])))
        return MorseDiagram(tuple(out))

    def to_json(self) -> dict:
        info = validate(self)
        return {
            "format": FORMAT_TAG,
            "width_profile": info.widths,
            "rows": [{"gen": r.gen, "at": r.at} for r in self.rows],
            "components": {str(c): {"orientation": "derived"} for c in range(info.n_components)},
        }


@dataclass
class _Slot:
    comp: int       # provisional component id
    up: bool        # orientation


@dataclass
class DiagramInfo:
    """Validation result: level-by-level slot data and component structure."""

    diagram: MorseDiagram
    widths: list[int]                 # width before each row, plus final width
    levels: list[list[_Slot]]         # slots before each row, plus final level
    n_components: int
    comp_of_slot: list[list[int]]     # canonical component id per slot per level
    crossings: list[tuple[int, int, int, int]]  # (row, comp_a, comp_b, sign)


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def validate(d: MorseDiagram) -> DiagramInfo:
    """Check arities and orientation consistency; derive components.

    Raises :class:`DiagramError` with the offending row index.
    """
    uf = _UnionFind()
    slots: list[_Slot] = []
    levels = [list(slots)]
    widths = [0]
    crossings_raw = []
    first_seen: dict[int, tuple[int, int]] = {}

    for ri, row in enumerate(d.rows):
        if row.gen not in GENS:
            raise DiagramError(f"unknown generator {row.gen!r}", ri)
        k = row.at
        if row.gen in ("cup", "cup_tilde"):
            if not 0 <= k <= len(slots):
                raise DiagramError(f"cup at {k} outside width {len(slots)}", ri)
            cid = uf.add()
            first_seen.setdefault(cid, (ri, k))
            up_left = row.gen == "cup"
            slots[k:k] = [_Slot(cid, up_left), _Slot(cid, not up_left)]
        elif row.gen in ("cap", "cap_tilde"):
            if not 0 <= k <= len(slots) - 2:
                raise DiagramError(f"cap at {k} exceeds width {len(slots)}", ri)
            a, b = slots[k], slots[k + 1]
            want = (False, True) if row.gen == "cap" else (True, False)
            if (a.up, b.up) != want:
                raise DiagramError(
                    f"orientation conflict at {row.gen}: slots are "
                    f"({'up' if a.up else 'down'},{'up' if b.up else 'down'})", ri)
            uf.union(a.comp, b.comp)
            del slots[k:k + 2]
        else:
            if not 0 <= k <= len(slots) - 2:
                raise DiagramError(f"crossing at {k} exceeds width {len(slots)}", ri)
            a, b = slots[k], slots[k + 1]
            sign = (1 if row.gen == "pos_crossing" else -1) \
                * (1 if a.up else -1) * (1 if b.up else -1)
            crossings_raw.append((ri, a.comp, b.comp, sign))
            slots[k], slots[k + 1] = b, a
        levels.append([_Slot(s.comp, s.up) for s in slots])
        widths.append(len(slots))
    widths[0] = len(levels[0])
    if slots:
        raise DiagramError(f"diagram not closed: final width {len(slots)}")

    # canonical component numbering by first appearance of the class
    roots: dict[int, int] = {}
    order = sorted(first_seen, key=lambda c: first_seen[c])
    canon: dict[int, int] = {}
    for cid in order:
        r = uf.find(cid)
        if r not in roots:
            roots[r] = len(roots)
        canon[cid] = roots[r]
    comp_of_slot = [[canon[s.comp] for s in lvl] for lvl in levels]
    crossings = [(ri, canon[a], canon[b], s) for ri, a, b, s in crossings_raw]
    return DiagramInfo(d, widths, levels, len(roots), comp_of_slot, crossings)


def parse(data: str | dict) -> MorseDiagram:
    """Parse and validate the JSON form of a diagram."""
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("format", FORMAT_TAG) != FORMAT_TAG:
        raise DiagramError(f"unsupported format {data.get('format')!r}")
    rows = []
    for i, r in enumerate(data["rows"]):
        if "gen" not in r or "at" not in r:
            raise DiagramError("row needs 'gen' and 'at'", i)
        rows.append(Row(str(r["gen"]), int(r["at"])))
    d = MorseDiagram(tuple(rows))
    info = validate(d)
    if "width_profile" in data and list(data["width_profile"]) != info.widths:
        raise DiagramError("width_profile does not match rows")
    return d


_DSL_ALIASES = {"cup": "cup", "cupt": "cup_tilde", "cap": "cap", "capt": "cap_tilde",
                "x+": "pos_crossing", "x-": "neg_crossing"}


def parse_dsl(text: str) -> MorseDiagram:
    """Tiny text front-end: one row per line, ``<gen> <at>``, '#' comments.

    Generators: cup cupt cap capt x+ x- (or the full JSON names).
    """
    rows = []
    for ln, line in enumerate(text.splitlines()):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DiagramError(f"bad DSL line {ln + 1}: {line!r}")
        gen = _DSL_ALIASES.get(parts[0], parts[0])
        rows.append(Row(gen, int(parts[1])))
    d = MorseDiagram(tuple(rows))
    validate(d)
    return d


# ---------------------------------------------------------------------------
# linking data


@dataclass
class LinkingData:
    matrix: np.ndarray          # symmetric integer matrix
    signature: tuple[int, int]  # (positive, negative) eigenvalue counts

    @property
    def nullity(self) -> int:
        return self.matrix.shape[0] - sum(self.signature)


def linking(d: MorseDiagram, info: DiagramInfo | None = None) -> LinkingData:
    """Linking numbers off the diagonal, writhes on it, plus the signature."""
    info = info or validate(d)
    n = info.n_components
    b = np.zeros((n, n))
    for ri, ca, cb, sign in info.crossings:
        if ca == cb:
            b[ca, ca] += sign
        else:
            b[ca, cb] += sign / 2
            b[cb, ca] += sign / 2
    bi = np.rint(b)
    if np.abs(b - bi).max(initial=0.0) > 1e-9:
        raise DiagramError("non-integer linking matrix (open component?)")
    eig = np.linalg.eigvalsh(bi)
    p = int(np.sum(eig > 1e-9))
    q = int(np.sum(eig < -1e-9))
    return LinkingData(bi.astype(int), (p, q))


# ---------------------------------------------------------------------------
# cabling


def cable(d: MorseDiagram, comp: int, k: int,
          info: DiagramInfo | None = None) -> tuple[MorseDiagram, dict[int, int]]:
    """Replace component ``comp`` by k parallel blackboard copies.

    Returns the new diagram and a map new-component-id -> old-component-id
    (all cable copies map to ``comp``).  k = 0 deletes the component.
    """
    info = info or validate(d)
    new_rows: list[Row] = []
    source_comp: list[int] = []  # old component owning each new row's cup
    for ri, row in enumerate(d.rows):
        lvl = info.comp_of_slot[ri]
        width = lambda c: k if c == comp else 1
        pos = lambda s: sum(width(c) for c in lvl[:s])
        s = row.at
        if row.gen in ("cup", "cup_tilde"):
            cid = info.comp_of_slot[ri + 1][s]  # component created here
            b = pos(s)
            w = width(cid)
            for j in range(w):
                new_rows.append(Row(row.gen, b + j))
                source_comp.append(cid)
        elif row.gen in ("cap", "cap_tilde"):
            cid = lvl[s]
            b = pos(s)
            for j in reversed(range(width(cid))):
                new_rows.append(Row(row.gen, b + j))
        else:
            ca, cb = lvl[s], lvl[s + 1]
            wa, wb = width(ca), width(cb)
            b = pos(s)
            # block transposition of widths (wa, wb): move each left strand
            # through the right block, outermost first
            for i in range(wa):
                for j in range(wb):
                    new_rows.append(Row(row.gen, b + wa - 1 - i + j))
    out = MorseDiagram(tuple(new_rows))
    new_info = validate(out)
    # map new components to old by matching cup rows
    comp_map: dict[int, int] = {}
    cup_idx = 0
    for ri, row in enumerate(out.rows):
        if row.gen in ("cup", "cup_tilde"):
            new_cid = new_info.comp_of_slot[ri + 1][row.at]
            comp_map[new_cid] = source_comp[cup_idx]
            cup_idx += 1
    return out, comp_map


# ---------------------------------------------------------------------------
# evaluation engine


ColorMap = Mapping[int, WeightModule]


class _Engine:
    """Sequential state-vector evaluation of a validated diagram.

    The state is kept as a 2-D array (flattened slot axes, spectator axes);
    cutting a component open inserts an identity-paired spectator block.
    """

    def __init__(self, rb: RibbonOps, info: DiagramInfo, colors: ColorMap,
                 max_dim: int = 10 ** 6):
        self.rb = rb
        self.info = info
        self.colors = dict(colors)
        self.max_dim = max_dim
        self._duals: dict[int, WeightModule] = {}

    def module_at(self, level: int, slot: int) -> WeightModule:
        s = self.info.levels[level][slot]
        c = self.info.comp_of_slot[level][slot]
        m = self.colors[c]
        if s.up:
            return m
        if c not in self._duals:
            self._duals[c] = dual(m)
        return self._duals[c]

    def run(self, cut: tuple[int, int] | None = None) -> np.ndarray:
        """Evaluate; ``cut=(level, slot)`` opens that edge and returns a matrix."""
        state = np.ones((1, 1), dtype=complex)
        dims: list[int] = []
        for ri, row in enumerate(self.info.diagram.rows):
            if cut is not None and cut[0] == ri:
                state, dims = self._open_edge(state, dims, cut[1])
            state, dims = self._apply(state, dims, ri, row)
            total = int(np.prod(dims, dtype=np.int64)) * state.shape[1]
            if total > self.max_dim:
                raise DiagramError(f"tensor dimension {total} exceeds limit "
                                   f"{self.max_dim}", ri)
        if cut is None:
            assert state.shape == (1, 1)
            return state[0, 0]
        d = int(round(state.shape[1] ** 0.5))
        return state.reshape(d, d)

    def _open_edge(self, state, dims, slot):
        d = dims[slot]
        p = int(np.prod(dims[:slot], dtype=np.int64))
        q = int(np.prod(dims[slot + 1:], dtype=np.int64))
        st = state.reshape(p, d, q, state.shape[1])
        # the value i arriving from below becomes a spectator; a fresh index j
        # enters the slot, identity-paired with a second spectator k
        st2 = np.einsum("piqs,jk->pjqsik", st, np.eye(d, dtype=complex))
        return st2.reshape(p * d * q, -1), dims

    def _apply(self, state, dims, ri, row):
        k = row.at
        spect = state.shape[1]
        if row.gen in ("cup", "cup_tilde"):
            m = self.module_at(ri + 1, k if row.gen == "cup" else k + 1)
            vec = (self.rb.coev(m) if row.gen == "cup" else self.rb.coev_tilde(m)).reshape(-1)
            p = int(np.prod(dims[:k], dtype=np.int64))
            q = int(np.prod(dims[k:], dtype=np.int64))
            st = state.reshape(p, q, spect)
            st2 = np.einsum("pqs,x->pxqs", st, vec)
            dims2 = dims[:k] + [m.dim, m.dim] + dims[k:]
            return st2.reshape(-1, spect), dims2
        if row.gen in ("cap", "cap_tilde"):
            m = self.module_at(ri, k + 1 if row.gen == "cap" else k)
            vec = (self.rb.ev(m) if row.gen == "cap" else self.rb.ev_tilde(m)).reshape(-1)
            p = int(np.prod(dims[:k], dtype=np.int64))
            q = int(np.prod(dims[k + 2:], dtype=np.int64))
            st = state.reshape(p, vec.size, q, spect)
            st2 = np.einsum("pxqs,x->pqs", st, vec)
            dims2 = dims[:k] + dims[k + 2:]
            return st2.reshape(-1, spect), dims2
        ma = self.module_at(ri, k)
        mb = self.module_at(ri, k + 1)
        if row.gen == "pos_crossing":
            mat = self.rb.braiding(ma, mb).matrix
        else:
            mat = self.rb.braiding_inv(mb, ma).matrix
        p = int(np.prod(dims[:k], dtype=np.int64))
        q = int(np.prod(dims[k + 2:], dtype=np.int64))
        st = state.reshape(p, ma.dim * mb.dim, q, spect)
        st2 = np.einsum("xy,pyqs->pxqs", mat, st)
        dims2 = dims[:k] + [mb.dim, ma.dim] + dims[k + 2:]
        return st2.reshape(-1, spect), dims2


FormalTerm = tuple[complex, object]       # (coefficient, WeightModule | ("cable", k))
FormalColor = list[FormalTerm]


def _normalize_colors(colors: Mapping[int, object], root: RootData) -> dict[int, FormalColor]:
    out: dict[int, FormalColor] = {}
    for c, spec in colors.items():
        if isinstance(spec, WeightModule):
            out[c] = [(1.0 + 0j, spec)]
        elif isinstance(spec, Poly):
            out[c] = [(coeff, ("cable", k)) for k, coeff in enumerate(spec.coeffs)
                      if abs(coeff) > 0]
        else:
            out[c] = [(complex(co), sp) for co, sp in spec]
    return out


def _expand_pure(rb: RibbonOps, d: MorseDiagram, colors: dict[int, FormalColor],
                 track: int | None = None):
    """Yield (coeff, diagram, pure ColorMap, tracked id) over the expansion.

    ``track`` follows a component through the renumbering that cabling of
    other components causes (the tracked component itself is never cabled).
    """
    pending = [c for c, terms in colors.items()
               if not (len(terms) == 1 and isinstance(terms[0][1], WeightModule)
                       and terms[0][0] == 1)]
    if not pending:
        yield 1.0 + 0j, d, {c: t[0][1] for c, t in colors.items()}, track
        return
    target = pending[0]
    s1 = simple_module(rb.root, 1)
    for coeff, spec in colors[target]:
        if isinstance(spec, WeightModule):
            sub = dict(colors)
            sub[target] = [(1.0 + 0j, spec)]
            for c2, d2, m2, t2 in _expand_pure(rb, d, sub, track):
                yield coeff * c2, d2, m2, t2
        else:
            k = spec[1]
            if track == target:
                raise DiagramError("cannot cable the cut component")
            d2, comp_map = cable(d, target, k)
            sub: dict[int, FormalColor] = {}
            new_track = None
            for new_c, old_c in comp_map.items():
                sub[new_c] = [(1.0 + 0j, s1)] if old_c == target else colors[old_c]
                if old_c == track:
                    new_track = new_c
            for c2, d3, m3, t3 in _expand_pure(rb, d2, sub, new_track):
                yield coeff * c2, d3, m3, t3


def rt_evaluate(rb: RibbonOps, d: MorseDiagram, colors: Mapping[int, object],
                max_dim: int = 10 ** 6) -> complex:
    """Ribbon-functor evaluation of a closed colored diagram.

    ``colors`` maps component ids to a module, a Poly (cabled powers of the
    two-dimensional simple), or an explicit list of (coeff, spec) terms;
    the result is multilinear in formal colors.
    """
    info = validate(d)
    cols = _normalize_colors(colors, rb.root)
    if set(cols) != set(range(info.n_components)):
        raise DiagramError(f"need colors for components 0..{info.n_components - 1}")
    total = 0j
    for coeff, d2, pure, _ in _expand_pure(rb, d, cols):
        eng = _Engine(rb, validate(d2), pure, max_dim)
        total += coeff * eng.run()
    return total


def _find_cut_edge(info: DiagramInfo, comp: int) -> tuple[int, int]:
    """First up-oriented edge of the component: (row index it enters, slot)."""
    for ri in range(1, len(info.levels)):
        for s, sl in enumerate(info.levels[ri]):
            if info.comp_of_slot[ri][s] == comp and sl.up:
                return ri, s
    raise DiagramError(f"component {comp} has no up-oriented edge")


def cut_and_evaluate(rb: RibbonOps, d: MorseDiagram, colors: Mapping[int, object],
                     comp: int, max_dim: int = 10 ** 6):
    """Open the diagram at a component with simple projective color.

    Returns the endomorphism of that color as a Morphism; by simplicity it
    must be scalar (checked by callers via ``.scalar()``).
    """
    info = validate(d)
    cols = _normalize_colors(colors, rb.root)
    if set(cols) != set(range(info.n_components)):
        raise DiagramError(f"need colors for components 0..{info.n_components - 1}")
    terms = cols[comp]
    if len(terms) != 1 or not isinstance(terms[0][1], WeightModule) or terms[0][0] != 1:
        raise DiagramError("cut component must carry a single module color")
    cut_mod = terms[0][1]
    if cut_mod.label.kind != "V":
        raise DiagramError("cut component not simple-projective")
    total = np.zeros((cut_mod.dim, cut_mod.dim), dtype=complex)
    for coeff, d2, pure, cut_id in _expand_pure(rb, d, cols, track=comp):
        inf2 = validate(d2)
        eng = _Engine(rb, inf2, pure, max_dim)
        total += coeff * eng.run(cut=_find_cut_edge(inf2, cut_id))
    from .repcat import Morphism
    return Morphism(cut_mod, cut_mod, total)


def f_invariant(rb: RibbonOps, d: MorseDiagram, colors: Mapping[int, object],
                cut_comp: int | None = None, max_dim: int = 10 ** 6) -> complex:
    """Renormalized link invariant: modified dimension times the cut scalar.

    The cut component must be colored by a typical module; the result does
    not depend on which admissible component is cut.
    """
    from .ribbon import modified_dim
    info = validate(d)
    cols = _normalize_colors(colors, rb.root)
    if cut_comp is None:
        cut_comp = next(c for c, t in sorted(cols.items())
                        if len(t) == 1 and isinstance(t[0][1], WeightModule)
                        and t[0][1].label.kind == "V")
    mod = cols[cut_comp][0][1]
    lam = cut_and_evaluate(rb, d, colors, cut_comp, max_dim).scalar()
    return modified_dim(rb.root, mod.label.param) * lam
