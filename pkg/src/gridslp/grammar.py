"""Core types for two-dimensional straight-line programs.

A plain 2D SLP is an acyclic grammar over single-character matrices: every
symbol carries exactly one production, which is either a 1x1 terminal, a
horizontal concatenation of two symbols of equal height, or a vertical
concatenation of two symbols of equal width.  The TSLP variant adds *context*
symbols deriving matrices with a single rectangular hole, together with
productions for building contexts (hole beside a ground matrix, context beside
a ground matrix, context composition) and for filling a context's hole with a
ground matrix (``Apply``).

Symbols are dense integer ids indexing ``rules``; the classes here are plain
frozen dataclasses so grammars hash, compare, and round-trip structurally.
Validation is total: it returns a report of violations instead of raising, so
callers (and the CLI) can surface every problem in a file at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Union


class GridSlpError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(GridSlpError):
    """Concatenation or hole-filling with incompatible dimensions."""


class OutOfBounds(GridSlpError):
    """A queried position lies outside the derived matrix."""


class AreaLimitExceeded(GridSlpError):
    """A materialization would exceed the configured cell budget."""


class ParameterError(GridSlpError):
    """Gadget parameters outside the constructible range."""


class NotOneDimensional(GridSlpError):
    """A height-1 grammar was required but the input derives height > 1."""


class InternalHoleHit(GridSlpError):
    """Navigation reached the unfilled hole of a context symbol."""


class FormatError(GridSlpError):
    """Malformed grammar text."""


# ---------------------------------------------------------------------------
# Productions


@dataclass(frozen=True, slots=True)
class Terminal:
    """A 1x1 matrix holding one character."""

    kind: ClassVar[str] = "term"
    char: str


@dataclass(frozen=True, slots=True)
class HConcat:
    """Place ``left`` and ``right`` side by side (equal heights)."""

    kind: ClassVar[str] = "h"
    left: int
    right: int


@dataclass(frozen=True, slots=True)
class VConcat:
    """Stack ``top`` above ``bottom`` (equal widths)."""

    kind: ClassVar[str] = "v"
    top: int
    bottom: int


@dataclass(frozen=True, slots=True)
class Apply:
    """Fill the hole of context ``ctx`` with ground symbol ``arg``."""

    kind: ClassVar[str] = "apply"
    ctx: int
    arg: int


@dataclass(frozen=True, slots=True)
class HoleConcat:
    """A bare hole concatenated with a ground matrix.

    ``axis`` is ``"H"`` or ``"V"``; ``hole_side`` says whether the hole is the
    ``"first"`` operand (left / top) or the ``"second"``.  The hole's own
    dimensions ``hole_h`` x ``hole_w`` are explicit because a bare hole has no
    production to infer them from; the perpendicular dimension must match the
    ground operand.
    """

    kind: ClassVar[str] = "hole"
    axis: str
    hole_side: str
    ground: int
    hole_h: int
    hole_w: int


@dataclass(frozen=True, slots=True)
class CtxConcat:
    """A context concatenated with a ground matrix (hole stays in the context).

    ``ctx_side`` says whether the context is the ``"first"`` operand
    (left / top) or the ``"second"``.
    """

    kind: ClassVar[str] = "ctxcat"
    axis: str
    ctx_side: str
    ctx: int
    ground: int


@dataclass(frozen=True, slots=True)
class Compose:
    """Plug context ``inner`` into the hole of context ``outer``.

    The result derives ``outer``'s frame with ``inner``'s frame occupying the
    old hole; the surviving hole is ``inner``'s, translated into the frame.
    """

    kind: ClassVar[str] = "compose"
    outer: int
    inner: int


Production = Union[Terminal, HConcat, VConcat, Apply, HoleConcat, CtxConcat, Compose]

#: Production kinds a plain (hole-free) grammar may use.
PLAIN_KINDS = ("term", "h", "v")

#: Production kinds whose symbol derives a matrix with a hole.
CONTEXT_KINDS = ("hole", "ctxcat", "compose")


def children(rule: Production) -> tuple[int, ...]:
    """Symbol ids referenced by ``rule``, in operand order."""
    k = rule.kind
    if k == "term":
        return ()
    if k == "h":
        return (rule.left, rule.right)
    if k == "v":
        return (rule.top, rule.bottom)
    if k == "apply":
        return (rule.ctx, rule.arg)
    if k == "hole":
        return (rule.ground,)
    if k == "ctxcat":
        return (rule.ctx, rule.ground)
    if k == "compose":
        return (rule.outer, rule.inner)
    raise GridSlpError(f"unknown production kind {k!r}")


def rule_size(rule: Production) -> int:
    """Contribution of one production to grammar size (right-hand symbols)."""
    return 1 if rule.kind == "term" else 2


LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"S{i}" for i in range(n))


@dataclass(frozen=True)
class Grammar2D:
    """A plain 2D straight-line program.

    ``rules[i]`` is the production for symbol ``i`` (``None`` marks a symbol
    that was referenced but never defined; validation reports it).  ``labels``
    are presentation names used by the text format, one per symbol.
    """

    text_kind: ClassVar[str] = "SLP2D"

    rules: tuple[Production | None, ...]
    start: int
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", _default_labels(len(self.rules)))
        if len(self.labels) != len(self.rules):
            raise ValueError("labels and rules must have equal length")

    @property
    def size(self) -> int:
        """Total right-hand-side symbol count over all productions."""
        return sum(rule_size(r) for r in self.rules if r is not None)

    @property
    def symbols(self) -> int:
        return len(self.rules)

    def label(self, sym: int) -> str:
        return self.labels[sym]


@dataclass(frozen=True)
class Tslp2D(Grammar2D):
    """A 2D SLP with contexts (single-hole matrices) as first-class symbols.

    Whether a symbol is ground or a context is determined by its production
    kind; the start symbol must be ground.
    """

    text_kind: ClassVar[str] = "TSLP2D"

    def is_context(self, sym: int) -> bool:
        r = self.rules[sym]
        return r is not None and r.kind in CONTEXT_KINDS


Grammar1D = Grammar2D
"""A 1D SLP is a 2D SLP whose every reachable symbol has height 1."""


def as_tslp(g: Grammar2D) -> Tslp2D:
    """View a plain grammar as a (context-free) TSLP with the same symbols."""
    if isinstance(g, Tslp2D):
        return g
    return Tslp2D(rules=g.rules, start=g.start, labels=g.labels)


# ---------------------------------------------------------------------------
# Traversal helpers


def reachable_topo(rules, start: int) -> list[int]:
    """Reachable symbols in dependency order (children before parents).

    Iterative post-order; assumes acyclicity and in-range references (run
    :func:`validate` first on untrusted input).
    """
    order: list[int] = []
    seen = bytearray(len(rules))
    stack: list[tuple[int, bool]] = [(start, False)]
    while stack:
        sym, expanded = stack.pop()
        if expanded:
            order.append(sym)
            continue
        if seen[sym]:
            continue
        seen[sym] = 1
        stack.append((sym, True))
        r = rules[sym]
        if r is not None:
            for c in children(r):
                if not seen[c]:
                    stack.append((c, False))
    return order


def topo_all(rules) -> list[int]:
    """Every defined symbol in dependency order (children before parents)."""
    order: list[int] = []
    seen = bytearray(len(rules))
    for root in range(len(rules)):
        if seen[root] or rules[root] is None:
            continue
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            sym, expanded = stack.pop()
            if expanded:
                order.append(sym)
                continue
            if seen[sym]:
                continue
            seen[sym] = 1
            stack.append((sym, True))
            for c in children(rules[sym]):
                if not seen[c] and rules[c] is not None:
                    stack.append((c, False))
    return order


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    """One validation failure, tied to the symbol it was detected at."""

    code: str
    symbol: int
    label: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.label}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate(g: Grammar2D, hole_marker: str = "#") -> ValidationReport:
    """Check structural soundness of ``g`` and report every violation found.

    Checks: references in range and defined, global acyclicity, kind
    discipline (plain grammars use only terminal/concat productions; TSLP
    operands have the required ground/context kinds), dimension compatibility,
    hole geometry (hole strictly inside a nonempty frame), start symbol ground,
    dimension overflow beyond 2**62, and — for TSLPs — that ``hole_marker``
    does not occur as a terminal character (it must stay reserved for
    materializing unfilled holes).
    """
    is_tslp = isinstance(g, Tslp2D)
    rules = g.rules
    n = len(rules)
    out: list[Violation] = []

    def bad(code: str, sym: int, msg: str):
        label = g.labels[sym] if 0 <= sym < n else str(sym)
        out.append(Violation(code, sym, label, msg))

    if not (0 <= g.start < n):
        bad("undefined", g.start, "start symbol id out of range")
        return ValidationReport(tuple(out))

    defined = [r is not None for r in rules]
    ref_ok = [True] * n
    for sym, r in enumerate(rules):
        if r is None:
            continue
        if not is_tslp and r.kind not in PLAIN_KINDS:
            bad("kind", sym, f"{r.kind} production not allowed in a plain grammar")
            ref_ok[sym] = False
            continue
        for c in children(r):
            if not (0 <= c < n):
                bad("undefined", sym, f"reference to out-of-range symbol {c}")
                ref_ok[sym] = False
            elif not defined[c]:
                bad("undefined", sym, f"reference to undefined symbol {g.labels[c]}")
                ref_ok[sym] = False
    if not defined[g.start]:
        bad("undefined", g.start, "start symbol has no production")

    # Global cycle check (iterative three-color DFS over all defined symbols).
    WHITE, GRAY, BLACK = 0, 1, 2
    color = bytearray(n)
    for root in range(n):
        if color[root] != WHITE or rules[root] is None:
            continue
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            sym, leaving = stack.pop()
            if leaving:
                color[sym] = BLACK
                continue
            if color[sym] == BLACK:
                continue
            if color[sym] == GRAY:
                continue
            color[sym] = GRAY
            stack.append((sym, True))
            if rules[sym] is None or not ref_ok[sym]:
                continue
            for c in children(rules[sym]):
                if color[c] == GRAY:
                    bad("cycle", c, "symbol participates in a reference cycle")
                elif color[c] == WHITE:
                    stack.append((c, False))
    if any(v.code in ("cycle", "undefined", "kind") for v in out):
        # Geometry is meaningless below a broken reference structure.
        return ValidationReport(tuple(out))

    # Bottom-up geometry pass shared with compute_geometry, collecting
    # violations instead of raising.
    from .geometry import geometry_pass  # local import to avoid a cycle

    geometry_pass(g, on_error=bad)

    if rules[g.start] is not None and rules[g.start].kind in CONTEXT_KINDS:
        bad("start", g.start, "start symbol must be ground (hole-free)")

    if is_tslp:
        for sym, r in enumerate(rules):
            if r is not None and r.kind == "term" and r.char == hole_marker:
                bad(
                    "marker",
                    sym,
                    f"terminal uses the hole marker {hole_marker!r}; pick a "
                    "different marker or alphabet",
                )

    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Builder


class GrammarBuilder:
    """Incremental construction with eager dimension checking.

    Tracks the frame (and hole) geometry of every added symbol so dimension
    errors surface at the offending call, not at validation time.  With
    ``dedup=True`` structurally identical productions are shared, which the
    gadget builders rely on for their size bounds.
    """

    def __init__(self, dedup: bool = True):
        self.rules: list[Production] = []
        self.labels: list[str] = []
        self._hw: list[tuple[int, int]] = []
        # context geometry: (hole_h, hole_w, hole_row, hole_col) or None
        self._hole: list[tuple[int, int, int, int] | None] = []
        self._dedup = dedup
        self._index: dict[Production, int] = {}
        self._used_labels: set[str] = set()

    @classmethod
    def seeded(cls, g: Grammar2D, dedup: bool = False) -> "GrammarBuilder":
        """A builder preloaded with a validated grammar's symbols."""
        from .geometry import compute_geometry

        geo = compute_geometry(g)
        b = cls(dedup=dedup)
        b.rules = list(g.rules)
        b.labels = list(g.labels)
        b._hw = [(geo.heights[i], geo.widths[i]) for i in range(len(g.rules))]
        b._hole = list(geo.holes)
        b._used_labels = set(g.labels)
        if dedup:
            for i, rule in enumerate(g.rules):
                b._index.setdefault(rule, i)
        return b

    # -- geometry accessors -------------------------------------------------

    def dims(self, sym: int) -> tuple[int, int]:
        return self._hw[sym]

    def hole(self, sym: int) -> tuple[int, int, int, int] | None:
        return self._hole[sym]

    def is_context(self, sym: int) -> bool:
        return self._hole[sym] is not None

    def __len__(self) -> int:
        return len(self.rules)

    # -- internals ----------------------------------------------------------

    def _add(self, rule: Production, hw, hole, label: str | None) -> int:
        if self._dedup:
            hit = self._index.get(rule)
            if hit is not None:
                return hit
        if max(hw) > 1 << 62:
            raise OverflowError(
                f"dimension {max(hw)} exceeds the 2**62 representable bound"
            )
        sym = len(self.rules)
        if label is None or label in self._used_labels or not LABEL_RE.match(label):
            label = f"S{sym}"
            while label in self._used_labels:
                label += "_"
        self.rules.append(rule)
        self.labels.append(label)
        self._hw.append(hw)
        self._hole.append(hole)
        self._used_labels.add(label)
        if self._dedup:
            self._index[rule] = sym
        return sym

    def _ground(self, sym: int, what: str):
        if self._hole[sym] is not None:
            raise DimensionMismatch(f"{what} must be ground, got context symbol {sym}")

    def _context(self, sym: int, what: str):
        if self._hole[sym] is None:
            raise DimensionMismatch(f"{what} must be a context, got ground symbol {sym}")

    # -- plain productions ----------------------------------------------------

    def terminal(self, char: str, label: str | None = None) -> int:
        if len(char) != 1:
            raise ParameterError("terminal payload must be a single character")
        return self._add(Terminal(char), (1, 1), None, label)

    def h(self, left: int, right: int, label: str | None = None) -> int:
        self._ground(left, "h operand")
        self._ground(right, "h operand")
        (h1, w1), (h2, w2) = self._hw[left], self._hw[right]
        if h1 != h2:
            raise DimensionMismatch(f"h-concat heights differ: {h1} vs {h2}")
        return self._add(HConcat(left, right), (h1, w1 + w2), None, label)

    def v(self, top: int, bottom: int, label: str | None = None) -> int:
        self._ground(top, "v operand")
        self._ground(bottom, "v operand")
        (h1, w1), (h2, w2) = self._hw[top], self._hw[bottom]
        if w1 != w2:
            raise DimensionMismatch(f"v-concat widths differ: {w1} vs {w2}")
        return self._add(VConcat(top, bottom), (h1 + h2, w1), None, label)

    # -- context productions --------------------------------------------------

    def hole_concat(
        self,
        axis: str,
        hole_side: str,
        ground: int,
        hole_h: int,
        hole_w: int,
        label: str | None = None,
    ) -> int:
        self._ground(ground, "hole-concat operand")
        if hole_h < 1 or hole_w < 1:
            raise DimensionMismatch("hole dimensions must be positive")
        gh, gw = self._hw[ground]
        if axis == "H":
            if hole_h != gh:
                raise DimensionMismatch(f"hole height {hole_h} != ground height {gh}")
            hw = (gh, hole_w + gw)
            origin = (1, 1) if hole_side == "first" else (1, gw + 1)
        elif axis == "V":
            if hole_w != gw:
                raise DimensionMismatch(f"hole width {hole_w} != ground width {gw}")
            hw = (hole_h + gh, gw)
            origin = (1, 1) if hole_side == "first" else (gh + 1, 1)
        else:
            raise ParameterError(f"axis must be 'H' or 'V', got {axis!r}")
        if hole_side not in ("first", "second"):
            raise ParameterError(f"hole_side must be 'first' or 'second', got {hole_side!r}")
        rule = HoleConcat(axis, hole_side, ground, hole_h, hole_w)
        return self._add(rule, hw, (hole_h, hole_w, *origin), label)

    def ctx_concat(
        self, axis: str, ctx_side: str, ctx: int, ground: int, label: str | None = None
    ) -> int:
        self._context(ctx, "ctx-concat operand")
        self._ground(ground, "ctx-concat operand")
        if ctx_side not in ("first", "second"):
            raise ParameterError(f"ctx_side must be 'first' or 'second', got {ctx_side!r}")
        (ch, cw), (gh, gw) = self._hw[ctx], self._hw[ground]
        p, q, r, c = self._hole[ctx]
        if axis == "H":
            if ch != gh:
                raise DimensionMismatch(f"h-concat heights differ: {ch} vs {gh}")
            hw = (ch, cw + gw)
            origin = (r, c) if ctx_side == "first" else (r, c + gw)
        elif axis == "V":
            if cw != gw:
                raise DimensionMismatch(f"v-concat widths differ: {cw} vs {gw}")
            hw = (ch + gh, cw)
            origin = (r, c) if ctx_side == "first" else (r + gh, c)
        else:
            raise ParameterError(f"axis must be 'H' or 'V', got {axis!r}")
        rule = CtxConcat(axis, ctx_side, ctx, ground)
        return self._add(rule, hw, (p, q, *origin), label)

    def compose(self, outer: int, inner: int, label: str | None = None) -> int:
        self._context(outer, "compose operand")
        self._context(inner, "compose operand")
        p, q, r, c = self._hole[outer]
        ih, iw = self._hw[inner]
        if (ih, iw) != (p, q):
            raise DimensionMismatch(
                f"inner frame {ih}x{iw} does not fit the outer hole {p}x{q}"
            )
        p2, q2, r2, c2 = self._hole[inner]
        hole = (p2, q2, r + r2 - 1, c + c2 - 1)
        return self._add(Compose(outer, inner), self._hw[outer], hole, label)

    def apply(self, ctx: int, arg: int, label: str | None = None) -> int:
        self._context(ctx, "apply operand")
        self._ground(arg, "apply operand")
        p, q, _, _ = self._hole[ctx]
        ah, aw = self._hw[arg]
        if (ah, aw) != (p, q):
            raise DimensionMismatch(f"argument {ah}x{aw} does not fit the hole {p}x{q}")
        return self._add(Apply(ctx, arg), self._hw[ctx], None, label)

    # -- k-ary convenience ----------------------------------------------------

    def chain(self, axis: str, parts: Iterable[int], label: str | None = None) -> int:
        """Left-leaning fold of ``parts`` along ``axis`` (ground symbols)."""
        parts = list(parts)
        if not parts:
            raise ParameterError("chain of zero parts")
        acc = parts[0]
        op = self.h if axis == "H" else self.v
        for nxt in parts[1:]:
            acc = op(acc, nxt)
        if (
            label is not None
            and len(parts) > 1
            and label not in self._used_labels
            and LABEL_RE.match(label)
        ):
            self._used_labels.add(label)
            self.labels[acc] = label
        return acc

    # -- finish ----------------------------------------------------------------

    def finish(self, start: int) -> Grammar2D:
        if self.is_context(start):
            raise DimensionMismatch("start symbol must be ground")
        if any(self._hole[s] is not None for s in range(len(self.rules))):
            return Tslp2D(tuple(self.rules), start, tuple(self.labels))
        if any(r.kind not in PLAIN_KINDS for r in self.rules):
            return Tslp2D(tuple(self.rules), start, tuple(self.labels))
        return Grammar2D(tuple(self.rules), start, tuple(self.labels))

    def finish_tslp(self, start: int) -> Tslp2D:
        if self.is_context(start):
            raise DimensionMismatch("start symbol must be ground")
        return Tslp2D(tuple(self.rules), start, tuple(self.labels))
