"""Named block hierarchies and anchored sequence windows.

Four families are supported:

* THETA   -- A_n = theta^n(00), B_n = theta^n(1), common tail C_n,
             l_n = len(C_n), l_{n+1} = 4 l_n + 4.
* ETA     -- A_n = eta^n(00), B_n = eta^n(1), l_n = len(A_n) = len(B_n)+1,
             l_{n+1} = 4 l_n - 2.
* GENERAL_S -- s(a) = aA, s(b) = bA constant length; blocks a A_n / b A_n
             with the common tail A_n, l_n = len(A_n).
* DJR     -- the rank-one block system B_1 = 010,
             B_{n+1} = B_n^{2^n} 1 B_n^{2^n}; h_{n+1} = 2^{n+1} h_n + 1.

Words are materialized up to a cap (default 10**7 symbols); beyond it
lengths and letter counts are still computed exactly by recurrence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InconclusiveError, InvalidInputError
from .substitution import Substitution, builtin, expand

__all__ = [
    "Family",
    "Level",
    "BlockHierarchy",
    "SequenceWindow",
    "build_hierarchy",
    "djr_ratio_limit",
    "window_from_hierarchy",
    "count_occurrences",
    "djr_block_occurrences",
    "MATERIALIZATION_CAP",
]

MATERIALIZATION_CAP = 10**7


class Family(enum.Enum):
    THETA = "theta"
    ETA = "eta"
    GENERAL_S = "general-s"
    DJR = "djr"

    @classmethod
    def parse(cls, name: str) -> "Family":
        for fam in cls:
            if fam.value == name or fam.name.lower() == name.lower():
                return fam
        raise InvalidInputError(f"unknown family {name!r}")


@dataclass(frozen=True)
class Level:
    """One level of a block hierarchy.

    For DJR only the B word exists and l is the paper's h_n; alpha/beta
    count the 0s and 1s of the word whose length l reports (C_n for
    THETA, A_n for ETA/GENERAL_S, B_n for DJR).  Words are None above
    the materialization cap, but l/alpha/beta stay exact.
    """

    n: int
    A: str | None
    B: str | None
    C: str | None
    l: int
    alpha: int
    beta: int
    materialized: bool


@dataclass(frozen=True)
class BlockHierarchy:
    family: Family
    sub: Substitution | None
    levels: tuple[Level, ...]

    def level(self, n: int) -> Level:
        if not 1 <= n <= len(self.levels):
            raise InvalidInputError(f"level {n} not built (depth {len(self.levels)})")
        return self.levels[n - 1]

    @property
    def depth(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class SequenceWindow:
    """A finite index-anchored window of a bi-infinite sequence.

    symbols[i] sits at global index lo + i; the window must straddle
    index 0.
    """

    symbols: str
    lo: int
    provenance: str = ""

    def __post_init__(self):
        if not (self.lo <= 0 <= self.lo + len(self.symbols) - 1):
            raise InvalidInputError("window must straddle index 0")

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def hi(self) -> int:
        """One past the last valid global index."""
        return self.lo + len(self.symbols)

    def at(self, i: int) -> str:
        if not self.lo <= i < self.hi:
            raise InvalidInputError(f"index {i} outside window [{self.lo}, {self.hi})")
        return self.symbols[i - self.lo]

    def slice(self, start: int, stop: int) -> str:
        if not (self.lo <= start and stop <= self.hi and start <= stop):
            raise InvalidInputError("slice outside window")
        return self.symbols[start - self.lo : stop - self.lo]

    def contains_range(self, start: int, stop: int) -> bool:
        return self.lo <= start and stop <= self.hi


def _count01(w: str) -> tuple[int, int]:
    zeros = w.count("0") + w.count("a")
    return zeros, len(w) - zeros


def build_hierarchy(
    family: Family | str,
    depth: int,
    sub: Substitution | None = None,
    cap: int = MATERIALIZATION_CAP,
) -> BlockHierarchy:
    """Build per-level blocks with their exact length/count bookkeeping."""
    fam = Family.parse(family) if isinstance(family, str) else family
    if depth < 1:
        raise InvalidInputError("depth must be >= 1")

    if fam is Family.DJR:
        return _build_djr(depth, cap)

    if fam is Family.THETA:
        sub = builtin("theta")
    elif fam is Family.ETA:
        sub = builtin("eta")
    elif sub is None:
        sub = builtin("theta-tilde")
    else:
        if sub.alphabet_size != 2:
            raise InvalidInputError("GENERAL_S needs a two-letter alphabet")
        ia, ib = sub.images
        if ia[0] != sub.alphabet[0] or ib[0] != sub.alphabet[1]:
            raise InvalidInputError("GENERAL_S images must start with their own letter")

    levels = []
    if fam in (Family.THETA, Family.ETA):
        A, B = expand(sub, "00"), expand(sub, "1")
    else:
        A, B = expand(sub, sub.alphabet[0]), expand(sub, sub.alphabet[1])
    for n in range(1, depth + 1):
        materialized = len(A) <= cap
        if fam is Family.THETA:
            C = A[2:]
            l = len(C)
            alpha, beta = _count01(C)
            levels.append(Level(n, A if materialized else None, B if materialized else None,
                                C if materialized else None, l, alpha, beta, materialized))
        elif fam is Family.ETA:
            l = len(A)
            alpha, beta = _count01(A)
            levels.append(Level(n, A if materialized else None, B if materialized else None,
                                None, l, alpha, beta, materialized))
        else:  # GENERAL_S: common tail exists for the class s(a)=aA, s(b)=bA
            C = A[1:] if A[1:] == B[1:] else None
            l = len(C) if C is not None else len(A)
            alpha, beta = _count01(C if C is not None else A)
            levels.append(Level(n, A if materialized else None, B if materialized else None,
                                C if (materialized and C is not None) else None,
                                l, alpha, beta, materialized))
        if n < depth:
            A, B = expand(sub, A), expand(sub, B)
            if len(A) > 8 * cap:
                raise InconclusiveError("expansion exceeded the materialization budget")
    return BlockHierarchy(fam, sub, tuple(levels))


def _build_djr(depth: int, cap: int) -> BlockHierarchy:
    levels = []
    B: str | None = "010"
    h, alpha, beta = 3, 2, 1
    for n in range(1, depth + 1):
        levels.append(Level(n, None, B, None, h, alpha, beta, B is not None))
        if n < depth:
            if B is not None and 2 ** (n + 1) * h + 1 <= cap:
                B = B * 2**n + "1" + B * 2**n
            else:
                B = None
            h = 2 ** (n + 1) * h + 1
            alpha = 2 ** (n + 1) * alpha
            beta = 1 + 2 ** (n + 1) * beta
    return BlockHierarchy(Family.DJR, None, tuple(levels))


def djr_ratio_limit(depth: int, tile_lengths: tuple[float, float] | None = None) -> dict:
    """beta_n/alpha_n sequence for the DJR system, with monotonicity and
    boundedness certificates, plus t_n/h_n when tile lengths are given."""
    if depth < 2:
        raise InvalidInputError("depth must be >= 2")
    h = _build_djr(depth, cap=0)  # lengths only
    ratios = [Fraction(lv.beta, lv.alpha) for lv in h.levels]
    monotone = all(ratios[i] < ratios[i + 1] for i in range(len(ratios) - 1))
    bounded = all(r <= 1 for r in ratios)
    out = {
        "depth": depth,
        "ratio": float(ratios[-1]),
        "ratios": [float(r) for r in ratios],
        "ratios_exact": [(r.numerator, r.denominator) for r in ratios],
        "monotone_increasing": monotone,
        "bounded_by_one": bounded,
    }
    if tile_lengths is not None:
        j0, j1 = tile_lengths
        tn_over_hn = [(lv.alpha * j0 + lv.beta * j1) / (lv.alpha + lv.beta) for lv in h.levels]
        diffs = [abs(tn_over_hn[i + 1] - tn_over_hn[i]) for i in range(len(tn_over_hn) - 1)]
        out["t_over_h"] = tn_over_hn
        out["t_over_h_diffs_decreasing"] = all(diffs[i + 1] < diffs[i] for i in range(len(diffs) - 1))
    return out


def window_from_hierarchy(
    h: BlockHierarchy,
    level: int,
    center_offset: int,
    half_width: int,
) -> SequenceWindow:
    """Cut a window of width 2*half_width+1 from a materialized block.

    Index 0 of the window sits center_offset symbols into the block, so
    the block's own position grid is preserved in the window's anchors.
    """
    lv = h.level(level)
    block = lv.B if h.family is Family.DJR else lv.A
    if block is None:
        raise InvalidInputError(f"level {level} is not materialized")
    if len(block) <= 2 * half_width:
        raise InvalidInputError("block shorter than the requested window")
    if not half_width <= center_offset <= len(block) - half_width - 1:
        raise InvalidInputError("center offset too close to the block edge")
    symbols = block[center_offset - half_width : center_offset + half_width + 1]
    return SequenceWindow(symbols, -half_width, f"{h.family.value}:A_{level}@{center_offset}")


def count_occurrences(text: str, pattern: str) -> int:
    """Overlapping occurrence count (str.count misses overlaps)."""
    if not pattern:
        raise InvalidInputError("empty pattern")
    count = start = 0
    while True:
        start = text.find(pattern, start)
        if start < 0:
            return count
        count += 1
        start += 1


def djr_block_occurrences(h: BlockHierarchy, pattern: str, level: int) -> int:
    """Exact occurrence count of pattern inside B_level, even above the
    materialization cap, by recursing over copy junctions.

    B_{n+1} = B_n^{2^n} 1 B_n^{2^n}: counts are 2^{n+1} copies of the
    B_n count plus occurrences straddling a junction, counted inside a
    tail+head boundary window.  Requires len(pattern) < h_m for the
    deepest materialized level m.
    """
    if h.family is not Family.DJR:
        raise InvalidInputError("djr_block_occurrences needs a DJR hierarchy")
    L = len(pattern)
    mat = [lv for lv in h.levels if lv.materialized]
    if not mat:
        raise InvalidInputError("no materialized level available")
    if L >= mat[-1].l:
        raise InconclusiveError("pattern longer than the deepest materialized block")

    def head(n: int, k: int) -> str:
        lv = h.level(n)
        if lv.B is not None:
            return lv.B[:k]
        return head(n - 1, k)  # B_n starts with B_{n-1}

    def tail(n: int, k: int) -> str:
        lv = h.level(n)
        if lv.B is not None:
            return lv.B[-k:]
        return tail(n - 1, k)  # B_n ends with B_{n-1}

    def straddling(seam: str, cut: int, mid: int) -> int:
        """Occurrences in seam crossing the [cut, cut+mid) junction."""
        total = 0
        for i in range(max(0, cut + mid - L), min(cut, len(seam) - L) + 1):
            if i + L > cut and seam[i : i + L] == pattern:
                total += 1
        return total

    cache: dict[int, int] = {}

    def cnt(n: int) -> int:
        if n in cache:
            return cache[n]
        lv = h.level(n)
        if lv.B is not None:
            res = count_occurrences(lv.B, pattern)
        else:
            m = n - 1
            reps = 2**m
            t, hd = tail(m, L - 1), head(m, L - 1)
            plain = straddling(t + hd, len(t), 0)
            with_one = straddling(t + "1" + hd, len(t), 1)
            res = 2 * reps * cnt(m) + 2 * (reps - 1) * plain + with_one
        cache[n] = res
        return res

    return cnt(level)
