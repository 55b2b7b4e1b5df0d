"""Row-level construction helpers for standard diagrams.

All builders produce closed diagrams in blackboard framing; framings are
realized as explicit kinks.  Conventions pinned by the evaluation tests:

* a positive kink on an up-strand at slot s is
  ``cup s+1 / x+ s / capt s+1`` and evaluates to the twist;
* a meridian with linking +1 around the strand at slot s is
  ``cup s+1 / x+ s / x- s+1 / capt s`` (loop closed above).
"""

from __future__ import annotations

from .diagram import MorseDiagram, Row

__all__ = [
    "RowBuilder",
    "unknot",
    "hopf_pair",
    "chain_link",
    "two_bridge_pattern",
]


class RowBuilder:
    """Accumulates rows; helpers know the current slot layout only implicitly,
    so callers state positions explicitly."""

    def __init__(self):
        self.rows: list[Row] = []

    def raw(self, gen: str, at: int) -> "RowBuilder":
        self.rows.append(Row(gen, at))
        return self

    def cup(self, at: int):
        return self.raw("cup", at)

    def cup_tilde(self, at: int):
        return self.raw("cup_tilde", at)

    def cap(self, at: int):
        return self.raw("cap", at)

    def cap_tilde(self, at: int):
        return self.raw("cap_tilde", at)

    def pos(self, at: int):
        return self.raw("pos_crossing", at)

    def neg(self, at: int):
        return self.raw("neg_crossing", at)

    def kink(self, at: int, sign: int):
        """Writhe +-1 curl on the up-strand at ``at``."""
        self.cup(at + 1)
        self.pos(at) if sign > 0 else self.neg(at)
        return self.cap_tilde(at + 1)

    def kinks(self, at: int, framing: int):
        for _ in range(abs(framing)):
            self.kink(at, 1 if framing > 0 else -1)
        return self

    def meridian(self, at: int, lk: int, framing: int = 0):
        """Close a loop around the up-strand at ``at`` with linking +-1."""
        self.cup(at + 1)
        self.kinks(at + 1, framing)
        if lk > 0:
            self.pos(at)
            self.neg(at + 1)
        else:
            self.neg(at)
            self.pos(at + 1)
        return self.cap_tilde(at)

    def done(self) -> MorseDiagram:
        return MorseDiagram(tuple(self.rows))


def unknot(framing: int = 0) -> MorseDiagram:
    b = RowBuilder().cup(0).kinks(0, framing)
    return b.cap_tilde(0).done()


def hopf_pair(f1: int, f2: int, lk: int = 1) -> MorseDiagram:
    """Hopf link: component 0 a round unknot with framing f1, component 1 a
    meridian of it with framing f2, linking +-1."""
    b = RowBuilder().cup(0).kinks(0, f1)
    b.meridian(0, lk, framing=f2)
    return b.cap_tilde(0).done()


def chain_link(framings: list[int]) -> MorseDiagram:
    """Chain C_0 - C_1 - ... - C_{n-1} with consecutive linking numbers +1.

    Component 0 is a round unknot; each later component is a meridian of the
    previous one's up-strand, left open until all deeper meridians are in
    place, so non-consecutive components are unlinked.
    """
    b = RowBuilder().cup(0).kinks(0, framings[0])
    for f in framings[1:]:
        b.cup(1).kinks(1, f).pos(0).neg(1)
    for _ in framings:
        b.cap_tilde(0)
    return b.done()


def two_bridge_pattern(crossings: int, f1: int, f2: int) -> MorseDiagram:
    """Closure of the 2-braid sigma_1**crossings with kinks for framings.

    For even ``crossings`` this is a 2-component link with linking number
    crossings/2 (component 0 carries f1 kinks, component 1 f2).
    """
    b = RowBuilder()
    b.cup(0)        # component 0: slots (0 up, 1 down)
    b.cup(1)        # component 1 nested: slots 0:a+ 1:b+ 2:b- 3:a-
    b.kinks(0, f1)
    b.kinks(1, f2)
    for _ in range(crossings):
        b.pos(0)
    if crossings % 2:
        raise ValueError("odd crossing count gives a knot, not a 2-component link")
    b.cap_tilde(1)
    return b.cap_tilde(0).done()
