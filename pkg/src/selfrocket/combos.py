"""Input representations, pooling operators and their 15 combinations."""

from __future__ import annotations

import enum
from typing import NamedTuple

__all__ = ["Representation", "Pooling", "ComboId", "ALL_COMBOS", "PPV_MIX"]


class Representation(enum.IntEnum):
    BASE = 0
    DIFF = 1
    MIX = 2

    @property
    def parts(self):
        """Plain representations whose features make up this set."""
        if self is Representation.MIX:
            return (Representation.BASE, Representation.DIFF)
        return (self,)


class Pooling(enum.IntEnum):
    PPV = 0
    GMP = 1
    MPV = 2
    MIPV = 3
    LSPV = 4


class ComboId(NamedTuple):
    representation: Representation
    pooling: Pooling

    @property
    def name(self):
        if self.representation is Representation.BASE:
            return self.pooling.name
        return f"{self.pooling.name}_{self.representation.name}"

    @property
    def index(self):
        return int(self.representation) * len(Pooling) + int(self.pooling)

    @classmethod
    def parse(cls, text):
        """Parse a display name such as ``"PPV"`` or ``"GMP_DIFF"``."""
        head, _, tail = text.strip().upper().partition("_")
        try:
            pooling = Pooling[head]
            representation = Representation[tail] if tail else Representation.BASE
        except KeyError:
            raise ValueError(f"unknown combination {text!r}") from None
        return cls(representation, pooling)

    def __str__(self):
        return self.name


# Enumeration order doubles as the final tie-break of the vote.
ALL_COMBOS = tuple(ComboId(r, p) for r in Representation for p in Pooling)
PPV_MIX = ComboId(Representation.MIX, Pooling.PPV)
