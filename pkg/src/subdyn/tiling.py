"""1-D suspension tiling flow over a subshift window.

A point of the tiling flow is (base window, current tile, intra-tile
offset).  Tile boundaries are held in exact integer coordinates: the
left endpoint of a tile is p*|J_0| + q*|J_1| where (p, q) counts the
letter tiles between the window's index-0 tile and the current one.
Boundary equality is decided on the integer pairs, never on floats;
real arithmetic only enters through the intra-tile offset and through
the user's time displacement t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InconclusiveError, InvalidInputError
from .hierarchy import SequenceWindow, count_occurrences
from .substitution import Substitution, expand, is_admissible, pf_frequencies

__all__ = [
    "GOLDEN",
    "SQRT2M1",
    "TileLengths",
    "default_lengths",
    "TilingPoint",
    "FlowCylinder",
    "flow",
    "flow_exact",
    "hits_cylinder",
    "cylinder_measure",
    "doubling_recode",
    "word_frequency",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT2M1 = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class TileLengths:
    """Tile length per letter; the irrationality of the ratio is
    asserted by the caller, not proven."""

    alphabet: str
    lengths: tuple[float, ...]
    ratio_irrational: bool = True

    def __post_init__(self):
        if len(self.alphabet) != len(self.lengths) or not self.alphabet:
            raise InvalidInputError("need exactly one length per letter")
        if any(l <= 0 for l in self.lengths):
            raise InvalidInputError("tile lengths must be positive")

    def of(self, letter: str) -> float:
        try:
            return self.lengths[self.alphabet.index(letter)]
        except ValueError:
            raise InvalidInputError(f"letter {letter!r} not in {self.alphabet!r}")


def default_lengths(alphabet: str = "01", alpha: float = GOLDEN) -> TileLengths:
    """The canonical normalization |J_0| = 1, |J_1| = alpha."""
    if len(alphabet) != 2:
        raise InvalidInputError("default lengths are for two-letter alphabets")
    return TileLengths(alphabet, (1.0, alpha))


@lru_cache(maxsize=16)
def _geometry(symbols: str, alphabet: str, lengths: tuple[float, ...]):
    """Prefix data for a window: boundary positions B (B[i] = position of
    the start of tile i relative to tile 0 of the string) and per-letter
    prefix counts for exact coordinates."""
    arr = np.frombuffer(symbols.encode(), dtype=np.uint8)
    per_tile = np.zeros(len(arr), dtype=np.float64)
    counts = {}
    for letter, length in zip(alphabet, lengths):
        mask = arr == ord(letter)
        per_tile[mask] = length
        counts[letter] = np.concatenate(([0], np.cumsum(mask, dtype=np.int64)))
    if not np.all(per_tile > 0):
        raise InvalidInputError("window contains letters without a tile length")
    B = np.concatenate(([0.0], np.cumsum(per_tile)))
    return B, counts


@dataclass(frozen=True)
class TilingPoint:
    """A point of the suspension: offset into the tile at tile_index."""

    base: SequenceWindow
    lengths: TileLengths
    tile_index: int = 0
    offset: float = 0.0

    def __post_init__(self):
        if not self.base.lo <= self.tile_index < self.base.hi:
            raise InvalidInputError("tile index outside the base window")
        if not 0 <= self.offset < self.lengths.of(self.letter):
            raise InvalidInputError("offset must lie in [0, current tile length)")

    @property
    def letter(self) -> str:
        return self.base.at(self.tile_index)

    @property
    def boundary_coords(self) -> tuple[int, ...]:
        """Per-letter signed tile counts between index 0 and the current
        tile's left endpoint (exact position coordinates)."""
        _, counts = _geometry(self.base.symbols, self.lengths.alphabet, self.lengths.lengths)
        i0, i = -self.base.lo, self.tile_index - self.base.lo
        return tuple(int(counts[a][i] - counts[a][i0]) for a in self.lengths.alphabet)

    @property
    def boundary_position(self) -> float:
        return float(np.dot(self.boundary_coords, self.lengths.lengths))

    @property
    def position(self) -> float:
        return self.boundary_position + self.offset


_SNAP = 1e-9


def flow(point: TilingPoint, t: float) -> TilingPoint:
    """Translate the point by time t (new point; the input is unchanged).

    Positions are recomputed from the window anchor on every call, so
    repeated flows do not accumulate drift.  Landing within 1e-9 of a
    tile boundary snaps to it, keeping combinatorial identities (first
    returns, group law) exact.
    """
    B, _ = _geometry(point.base.symbols, point.lengths.alphabet, point.lengths.lengths)
    i0 = point.tile_index - point.base.lo
    total = B[i0] + point.offset + t
    j = int(np.searchsorted(B, total, side="right")) - 1
    if j + 1 < len(B) and abs(total - B[j + 1]) <= _SNAP:
        j += 1
        off = 0.0
    else:
        off = float(total - B[j]) if 0 <= j < len(B) - 1 else 0.0
        if 0 <= j < len(B) - 1 and off <= _SNAP:
            off = 0.0
    if not 0 <= j < len(B) - 1:
        raise InconclusiveError("displacement exceeds the window support")
    return TilingPoint(point.base, point.lengths, point.base.lo + j, off)


def flow_exact(point: TilingPoint, coords: tuple[int, ...]) -> TilingPoint:
    """Translate by an exact displacement given in per-letter tile counts
    (position shift = sum coords[i] * |J_i|), keeping the offset.

    The target tile boundary is located by exact integer-pair equality,
    so e.g. a displacement of one J_1 tile is verifiable exactly.
    """
    alphabet = point.lengths.alphabet
    if len(coords) != len(alphabet):
        raise InvalidInputError("need one coordinate per letter")
    _, counts = _geometry(point.base.symbols, alphabet, point.lengths.lengths)
    i0 = point.tile_index - point.base.lo
    cand = i0 + sum(coords)  # boundary index is forced by the total tile count
    if not 0 <= cand < len(point.base.symbols):
        raise InconclusiveError("exact displacement leaves the window support")
    if any(
        int(counts[a][cand]) - int(counts[a][i0]) != c for a, c in zip(alphabet, coords)
    ):
        raise InconclusiveError(
            "tiles between here and the target do not have the requested composition"
        )
    return TilingPoint(point.base, point.lengths, point.base.lo + cand, point.offset)


@dataclass(frozen=True)
class FlowCylinder:
    """[u] x I: tilings reading u from the current tile with the left
    endpoint offset in the closed-open interval I."""

    word: str
    interval: tuple[float, float]

    def __post_init__(self):
        if not self.word:
            raise InvalidInputError("cylinder word must be nonempty")
        lo, hi = self.interval
        if not 0 <= lo < hi:
            raise InvalidInputError("interval must be nonempty with 0 <= lo < hi")

    def validate(self, lengths: TileLengths) -> None:
        if self.interval[1] > lengths.of(self.word[0]):
            raise InvalidInputError("interval exceeds the first tile's length")


def hits_cylinder(point: TilingPoint, cyl: FlowCylinder) -> bool:
    """Whether the point lies in [u] x I (closed-open in the offset)."""
    cyl.validate(point.lengths)
    u = cyl.word
    if not point.base.contains_range(point.tile_index, point.tile_index + len(u)):
        raise InconclusiveError("window too short to read the cylinder word")
    if point.base.slice(point.tile_index, point.tile_index + len(u)) != u:
        return False
    lo, hi = cyl.interval
    return lo <= point.offset < hi


def word_frequency(sub: Substitution, u: str, min_length: int = 10**6) -> float:
    """Frequency of u in a deep expansion (>= min_length symbols); exact
    letter frequency via the eigenvector when |u| = 1."""
    if not is_admissible(sub, u):
        return 0.0
    if len(u) == 1:
        freqs = pf_frequencies(sub).frequencies
        return freqs[sub.alphabet.index(u)]
    w = sub.alphabet[0]
    while len(w) < min_length + 2 * len(u):
        w = expand(sub, w)
    return count_occurrences(w, u) / (len(w) - len(u) + 1)


def cylinder_measure(
    sub: Substitution,
    lengths: TileLengths,
    cyl: FlowCylinder,
    mu_u: float | None = None,
) -> float:
    """The invariant measure of [u] x I:
    mu([u]) * |I| / sum_a mu([a]) |J_a|."""
    cyl.validate(lengths)
    if not is_admissible(sub, cyl.word):
        raise InvalidInputError(f"cylinder word {cyl.word!r} is not admissible")
    if mu_u is None:
        mu_u = word_frequency(sub, cyl.word)
    freqs = pf_frequencies(sub).frequencies
    normalizer = sum(f * lengths.of(a) for f, a in zip(freqs, sub.alphabet))
    lo, hi = cyl.interval
    return mu_u * (hi - lo) / normalizer


def doubling_recode(point: TilingPoint) -> TilingPoint:
    """Recode a {0,1} tiling point to the {a,b} system with J_a = J_0 J_0
    and J_b = J_1 (a conjugacy: recoded boundaries are a subset of the
    original ones and the flow commutes with the recoding)."""
    lens = point.lengths
    if lens.alphabet != "01":
        raise InvalidInputError("doubling recode expects the alphabet '01'")
    sym = point.base.symbols
    arr = np.frombuffer(sym.encode(), dtype=np.uint8)
    ones = np.nonzero(arr == ord("1"))[0]
    if ones.size < 2:
        raise InvalidInputError("window too short to anchor the 00-pairing")
    zeros = np.nonzero(arr == ord("0"))[0]
    zeros = zeros[(zeros > ones[0]) & (zeros < ones[-1])]
    if zeros.size % 2 or np.any(zeros[1::2] != zeros[0::2] + 1):
        raise InvalidInputError("0-letters do not pair up as 00 blocks")
    starts = np.sort(np.concatenate([zeros[0::2], ones]))
    letters = np.where(np.isin(starts, ones), "b", "a")
    # the recoded window is indexed so that the tile containing the old
    # index 0 keeps the anchor role
    old_zero = -point.base.lo
    anchor = int(np.searchsorted(starts, old_zero, side="right")) - 1
    if anchor < 0:
        raise InvalidInputError("old index 0 lies outside the pairable region")
    new_symbols = "".join(letters)
    new_base = SequenceWindow(new_symbols, -anchor, provenance="doubling-recode")
    new_lengths = TileLengths("ab", (2 * lens.lengths[0], lens.lengths[1]), lens.ratio_irrational)
    old_tile = point.tile_index - point.base.lo
    j = int(np.searchsorted(starts, old_tile, side="right")) - 1
    if j < 0 or j >= len(starts):
        raise InvalidInputError("current tile outside the pairable region")
    extra = lens.lengths[0] if old_tile != starts[j] else 0.0
    return TilingPoint(new_base, new_lengths, j - anchor, point.offset + extra)
