"""Desubstitution parsing and structure-witness search.

The three parse families share one shape: a bi-infinite admissible
sequence is tiled by two "pieces" with distinct first letters

* THETA:     theta(00) = 001001   and  theta(1) = 11001
* ETA:       eta(00)   = 001001   and  eta(1)   = 11100
* GENERAL_S: s(a) = aA            and  s(b) = bA

so a finite admissible word W decomposes as K1 . piece ... piece . K2
with K1/K2 boundary remainders.  The anchor word (the second piece for
THETA/ETA, s(bba) or s(aab) for GENERAL_S) can never straddle a piece
boundary, which pins the boundary phase of every long enough word and
makes the decomposition unique.

On top of the parser sit the level-n block decomposition (n rounds of
desubstitution, then grouping 00 -> A-block, 1 -> B-block) and the
structure-witness search: given two windows that do not visibly lie on
the same orbit, find a level where their aligned block sequences first
disagree close to the origin and emit the mismatch patterns
(C_n 1 C_n vs C_n 00 C_n for THETA; the A/B block cases for ETA)
together with the overlap-interval data (L, M, t, gamma).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InconclusiveError, InvalidInputError, VerificationError
from .hierarchy import Family, SequenceWindow
from .substitution import Substitution, builtin, expand, is_admissible

__all__ = [
    "ParseResult",
    "LevelDecomposition",
    "StructureWitness",
    "anchor_word",
    "parse_threshold",
    "parse",
    "decompose",
    "same_orbit",
    "find_structure_witness",
    "witness_intervals",
    "witness_shift_consistency",
]

# pieces (Pa, Pb): Pa = image of the doubled letter, Pb = image of the other
_PIECES = {
    Family.THETA: ("001001", "11001"),
    Family.ETA: ("001001", "11100"),
}
_ADM_SUB = {Family.THETA: "theta", Family.ETA: "eta"}


def _family(family: Family | str) -> Family:
    return Family.parse(family) if isinstance(family, str) else family


def _pieces(fam: Family, sub: Substitution | None) -> tuple[str, str]:
    if fam in _PIECES:
        return _PIECES[fam]
    if fam is Family.GENERAL_S:
        if sub is None:
            raise InvalidInputError("GENERAL_S parsing needs an explicit substitution")
        return sub.images  # s(a) = aA, s(b) = bA are themselves the pieces
    raise InvalidInputError(f"{fam.value} has no parse lemma")


def _adm_sub(fam: Family, sub: Substitution | None) -> Substitution:
    if fam in _ADM_SUB:
        return builtin(_ADM_SUB[fam])
    if sub is None:
        raise InvalidInputError("GENERAL_S parsing needs an explicit substitution")
    return sub


def _split_item(fam: Family, piece: str) -> tuple[str, str]:
    """Split a piece into (v, C): 00/1 + remainder, or letter + tail A."""
    if fam is Family.GENERAL_S:
        return piece[0], piece[1:]
    return ("00", piece[2:]) if piece[0] == "0" else ("1", piece[1:])


def anchor_word(family: Family | str, sub: Substitution | None = None) -> str:
    """The word whose forced position pins the parse phase."""
    fam = _family(family)
    if fam is Family.THETA:
        return "11001"
    if fam is Family.ETA:
        return "11100"
    if fam is Family.GENERAL_S:
        s = _adm_sub(fam, sub)
        a, b = s.alphabet
        seed = b + b + a if is_admissible(s, b + b) else a + a + b
        return expand(s, seed)
    raise InvalidInputError(f"{fam.value} has no parse lemma")


_threshold_cache: dict = {}


def parse_threshold(family: Family | str, sub: Substitution | None = None) -> int:
    """Least length m such that every admissible word of length m contains
    the anchor word, found by exhaustive enumeration."""
    fam = _family(family)
    key = (fam, sub)
    if key in _threshold_cache:
        return _threshold_cache[key]
    from .substitution import admissible_words

    s = _adm_sub(fam, sub)
    anchor = anchor_word(fam, sub)
    for length in range(len(anchor), 400):
        if all(anchor in w for w in admissible_words(s, length)):
            _threshold_cache[key] = length
            return length
    raise InconclusiveError("no anchor-containment threshold below length 400")


# ---------------------------------------------------------------------------
# parsing finite words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParseResult:
    """All boundary-phase decompositions of a word.

    K1 + concatenation of v.C items + K2 reproduces the word; all_parses
    holds every valid phase as (K1, items, K2) triples, and interior
    holds (piece, offset) placements of words that fit strictly inside
    one piece without touching a boundary (an extension needed to cover
    short admissible words the K1/pieces/K2 form misses).
    """

    word: str
    family: str
    K1: str
    items: tuple[tuple[str, str], ...]
    K2: str
    unique: bool
    all_parses: tuple[tuple[str, tuple[tuple[str, str], ...], str], ...]
    interior: tuple[tuple[str, int], ...]

    @property
    def reconstruction(self) -> str:
        return self.K1 + "".join(v + c for v, c in self.items) + self.K2


def _boundary_phases(W: str, pieces: tuple[str, str]):
    """All valid first-boundary positions with their piece runs."""
    by_first = {p[0]: p for p in pieces}
    if len(by_first) != len(pieces):
        raise InvalidInputError("pieces must have distinct first letters")
    suffixes = {p[-k:] for p in pieces for k in range(1, len(p))}
    out = []
    for b in range(len(W) + 1):
        K1 = W[:b]
        if K1 and K1 not in suffixes:
            continue
        pos, items, K2, ok = b, [], "", True
        while pos < len(W):
            P = by_first.get(W[pos])
            if P is None:
                ok = False
                break
            if pos + len(P) <= len(W):
                if W.startswith(P, pos):
                    items.append(P)
                    pos += len(P)
                else:
                    ok = False
                    break
            else:
                if P.startswith(W[pos:]):
                    K2 = W[pos:]
                    pos = len(W)
                else:
                    ok = False
                    break
        if ok:
            out.append((K1, tuple(items), K2))
    return out


def parse(family: Family | str, W: str, sub: Substitution | None = None) -> ParseResult:
    """Decompose an admissible word into K1 . pieces . K2.

    For words of length >= parse_threshold the decomposition is unique;
    shorter words may carry several phases (all returned) and very short
    words may only fit strictly inside one piece (returned as interior
    placements with empty items).
    """
    fam = _family(family)
    pieces = _pieces(fam, sub)
    if not W:
        raise InvalidInputError("cannot parse the empty word")
    if not is_admissible(_adm_sub(fam, sub), W):
        raise InvalidInputError(f"word {W!r} is not admissible for {fam.value}")
    phases = _boundary_phases(W, pieces)
    interior = tuple(
        (P, o)
        for P in pieces
        for o in range(1, len(P) - len(W))
        if P.startswith(W, o)
    )
    total = len(phases) + len(interior)
    if total == 0:
        raise VerificationError(f"admissible word {W!r} has no parse")  # pragma: no cover
    unique = total == 1
    if phases:
        K1, items, K2 = phases[0]
    else:
        K1, items, K2 = W, (), ""
    split = tuple(
        (k1, tuple(_split_item(fam, p) for p in it), k2) for k1, it, k2 in phases
    )
    return ParseResult(
        word=W,
        family=fam.value,
        K1=K1,
        items=tuple(_split_item(fam, p) for p in items),
        K2=K2,
        unique=unique,
        all_parses=() if unique else split,
        interior=interior,
    )


# ---------------------------------------------------------------------------
# level-n decomposition of long windows
# ---------------------------------------------------------------------------


def _occurrence_mask(arr: np.ndarray, pat: bytes) -> np.ndarray:
    m = len(arr) - len(pat) + 1
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(m, dtype=bool)
    for d, ch in enumerate(pat):
        mask &= arr[d : d + m] == ch
    return np.nonzero(mask)[0]


def _desub_round(arr: np.ndarray, pos: np.ndarray, Pa: bytes, Pb: bytes):
    """One desubstitution round, anchored on the Pb occurrences.

    Pb occurrences are exactly the Pb piece boundaries (the anchor never
    straddles a boundary); the gaps between them must be tiled by Pa.
    Returns the desubstituted letters with the original positions of
    their piece starts.
    """
    q = _occurrence_mask(arr, Pb)
    if q.size == 0:
        raise InconclusiveError("window too short to desubstitute (no anchor found)")
    la, lb = len(Pa), len(Pb)
    gap_start = q[:-1] + lb
    gap_len = q[1:] - gap_start
    if np.any(gap_len % la) or np.any(gap_len < 0):
        raise InvalidInputError("window is not tiled by the substitution pieces")
    reps = gap_len // la
    base = np.repeat(gap_start, reps)
    if base.size:
        group_first = np.repeat(np.concatenate(([0], np.cumsum(reps)[:-1])), reps)
        pa = base + (np.arange(base.size) - group_first) * la
    else:
        pa = np.empty(0, dtype=np.int64)
    # extend over the edge regions outside the outermost anchors
    lead = []
    b = int(q[0])
    while b - la >= 0 and arr[b - la : b].tobytes() == Pa:
        b -= la
        lead.append(b)
    trail = []
    b = int(q[-1]) + lb
    while b + la <= len(arr) and arr[b : b + la].tobytes() == Pa:
        trail.append(b)
        b += la
    pa = np.concatenate([np.array(lead[::-1], dtype=np.int64), pa, np.array(trail, dtype=np.int64)])
    for d, ch in enumerate(Pa):
        if not np.all(arr[pa + d] == ch):
            raise InvalidInputError("window is not tiled by the substitution pieces")
    half = la // 2  # Pa is the doubled-letter image: two letters per piece
    idx = np.concatenate([pa, pa + half, q])
    letters = np.concatenate(
        [
            np.full(pa.size, ord("0"), dtype=np.uint8),
            np.full(pa.size, ord("0"), dtype=np.uint8),
            np.full(q.size, ord("1"), dtype=np.uint8),
        ]
    )
    order = np.argsort(idx, kind="stable")
    return letters[order], pos[idx[order]]


@dataclass(frozen=True)
class LevelDecomposition:
    """Complete level-n blocks of a window: types[i] in 'AB' starts at
    starts[i] (window-global coordinates)."""

    family: Family
    level: int
    types: str
    starts: np.ndarray
    len_A: int
    len_B: int

    def block_len(self, t: str) -> int:
        return self.len_A if t == "A" else self.len_B

    def index_containing(self, i: int) -> int:
        j = int(np.searchsorted(self.starts, i, side="right")) - 1
        if j < 0 or i >= self.starts[j] + self.block_len(self.types[j]):
            raise InconclusiveError(f"index {i} not covered by the decomposition")
        return j


@lru_cache(maxsize=12)
def _theta_l(n: int) -> int:
    l = 4
    for _ in range(n - 1):
        l = 4 * l + 4
    return l


@lru_cache(maxsize=12)
def _eta_l(n: int) -> int:
    l = 6
    for _ in range(n - 1):
        l = 4 * l - 2
    return l


def _block_lengths(fam: Family, level: int) -> tuple[int, int]:
    if fam is Family.THETA:
        l = _theta_l(level)
        return l + 2, l + 1
    l = _eta_l(level)
    return l, l - 1


@lru_cache(maxsize=16)
def _decompose_symbols(symbols: str, fam: Family, level: int):
    Pa, Pb = (p.encode() for p in _PIECES[fam])
    arr = np.frombuffer(symbols.encode(), dtype=np.uint8)
    pos = np.arange(len(arr), dtype=np.int64)
    for _ in range(level):
        arr, pos = _desub_round(arr, pos, Pa, Pb)
    # group: every '1' letter is a complete B-block; interior runs of '0'
    # letters have even length and pair up into A-blocks.  Edge runs may
    # be truncated, so only zeros between the outermost '1's are grouped.
    ones = np.nonzero(arr == ord("1"))[0]
    if ones.size < 2:
        raise InconclusiveError("window too short for this decomposition level")
    zeros = np.nonzero(arr == ord("0"))[0]
    zeros = zeros[(zeros > ones[0]) & (zeros < ones[-1])]
    if zeros.size % 2:
        raise VerificationError("odd interior run of doubled letters")  # pragma: no cover
    a_first = zeros[0::2]
    if np.any(zeros[1::2] != a_first + 1):
        raise VerificationError("doubled letters failed to pair")  # pragma: no cover
    starts = np.concatenate([pos[a_first], pos[ones]])
    types = np.concatenate(
        [np.full(a_first.size, ord("A"), np.uint8), np.full(ones.size, ord("B"), np.uint8)]
    )
    order = np.argsort(starts, kind="stable")
    starts, types = starts[order], types[order]
    len_A, len_B = _block_lengths(fam, level)
    lens = np.where(types == ord("A"), len_A, len_B)
    gaps = np.diff(starts) - lens[:-1]
    # blocks adjacent to a dropped edge run leave a gap; interior must be tight
    keep_lo, keep_hi = 1, len(starts) - 1
    if np.any(gaps[keep_lo:keep_hi - 1] != 0):
        raise VerificationError("level blocks are not contiguous")  # pragma: no cover
    return types[keep_lo:keep_hi].tobytes().decode(), starts[keep_lo:keep_hi]


def decompose(family: Family | str, window: SequenceWindow, level: int) -> LevelDecomposition:
    """Decompose a window into complete level-`level` blocks A_n/B_n."""
    fam = _family(family)
    if fam not in _PIECES:
        raise InvalidInputError("level decomposition supports THETA and ETA")
    if level < 1:
        raise InvalidInputError("level must be >= 1")
    types, starts = _decompose_symbols(window.symbols, fam, level)
    len_A, len_B = _block_lengths(fam, level)
    return LevelDecomposition(fam, level, types, starts + window.lo, len_A, len_B)


# ---------------------------------------------------------------------------
# orbit check and structure witnesses
# ---------------------------------------------------------------------------


def same_orbit(x: SequenceWindow, y: SequenceWindow, horizon: int) -> int | None:
    """Shift k with x_{i+k} == y_i on the whole overlap, or None.

    Certifies only window-level agreement, not true orbit equality.
    Smallest |k| wins; on a tie the negative shift is returned first.
    """
    if horizon < 0:
        raise InvalidInputError("horizon must be >= 0")
    for a in range(horizon + 1):
        for k in ((0,) if a == 0 else (-a, a)):
            lo = max(x.lo - k, y.lo)
            hi = min(x.hi - k, y.hi)
            if hi - lo < max(1, 2 * horizon):
                raise InconclusiveError(
                    f"overlap {hi - lo} too small for horizon {horizon}"
                )
            if x.slice(lo + k, hi + k) == y.slice(lo, hi):
                return k
    return None


@dataclass(frozen=True)
class StructureWitness:
    """A mismatch-pattern certificate for a pair of windows.

    m1 locates the first pattern (C_n 1 C_n for THETA; the A-heavy block
    pattern for ETA) in its own window's coordinates, m2 the second
    (C_n 00 C_n / the all-B pattern).  swapped says the first pattern
    lives in the caller's y window.  exact_side names the caller window
    on which the t-shift is exact (the other side shifts by t+1).
    """

    family: str
    n: int
    m: int
    m1: int
    m2: int
    case: str
    k_align: int
    s_index: int
    swapped: bool
    branch: str
    exact_side: str
    pattern_first: str
    pattern_second: str
    L: tuple[int, int]
    M: tuple[int, int]
    t_shift: int
    gamma: float
    gamma_ok: bool
    bounds_ok: bool


class _Ascend(Exception):
    """Internal: no qualifying mismatch at this level; go one level up."""


def _first_block_lengths(fam: Family, case: str, n: int) -> tuple[int, int]:
    if fam is Family.THETA:
        l = _theta_l(n)
        return l, l
    l = _eta_l(n)
    return {"ETA_I": (l, l - 1), "ETA_II": (l - 1, l - 1), "ETA_III": (l, l - 1)}[case]


def _intervals(fam: Family, case: str, n: int, m: int, m1: int, m2: int):
    if fam is Family.THETA:
        R = (m + 4) * (_theta_l(n) + 2)
        t = _theta_l(n) + 1
    else:
        R = (m + 4) * _eta_l(n + 1)
        t = _eta_l(n) - 1 if case == "ETA_III" else 2 * _eta_l(n) - 2
    len1, len2 = _first_block_lengths(fam, case, n)
    a = max(m1, m2)
    b = min(m1 + len1, m2 + len2)  # exclusive
    gamma = max(0, b - a) / (2 * R)
    return (-R, R), (a, b - 1), t, gamma


def witness_intervals(w: StructureWitness):
    """(L, M, t_shift, gamma) exactly as the joining proofs prescribe."""
    fam = Family.parse(w.family)
    return _intervals(fam, w.case, w.n, w.m, w.m1, w.m2)


def witness_shift_consistency(
    w: StructureWitness, x: SequenceWindow, y: SequenceWindow
) -> bool:
    """Check symbol equality under the t-shift over M: exact t on
    exact_side, t+1 on the other, as the joining lemma requires."""
    a, b = w.M
    if a > b:
        return False
    t = w.t_shift
    for win, extra in ((x, 0 if w.exact_side == "x" else 1), (y, 0 if w.exact_side == "y" else 1)):
        if not win.contains_range(a, b + t + extra + 2):
            raise InconclusiveError("window too short for the shift-consistency check")
        if win.slice(a, b + 1) != win.slice(a + t + extra, b + t + extra + 1):
            return False
    return True


def _aligned_mismatch(dx: LevelDecomposition, dy: LevelDecomposition):
    """Align block grids (minimal |k|, negative on ties) and find the
    minimal-|s| type mismatch."""
    ix0 = dx.index_containing(0)
    target = int(dx.starts[ix0])
    j = int(np.searchsorted(dy.starts, target))
    candidates = [c for c in (j - 1, j) if 0 <= c < len(dy.types)]
    if not candidates:
        raise InconclusiveError("no alignable block in the second window")
    jy0 = min(candidates, key=lambda c: (abs(target - int(dy.starts[c])), target - int(dy.starts[c])))
    k = target - int(dy.starts[jy0])
    s_hi = min(len(dx.types) - 1 - ix0, len(dy.types) - 1 - jy0)
    s_lo = -min(ix0, jy0)
    for a in range(0, max(s_hi, -s_lo) + 1):
        for s in ((0,) if a == 0 else (a, -a)):
            if s_lo <= s <= s_hi and dx.types[ix0 + s] != dy.types[jy0 + s]:
                return ix0, jy0, k, s
    raise InconclusiveError("block sequences agree on the whole aligned overlap")


def _verify_pattern(win: SequenceWindow, pos: int, pattern: str) -> None:
    if not win.contains_range(pos, pos + len(pattern)):
        raise InconclusiveError("window too short to verify the witness pattern")
    if win.slice(pos, pos + len(pattern)) != pattern:
        raise VerificationError(
            f"expected pattern of length {len(pattern)} at {pos} not found"
        )


@lru_cache(maxsize=32)
def _theta_C(n: int) -> str:
    return expand(builtin("theta"), "00", n)[2:]


@lru_cache(maxsize=32)
def _eta_block(n: int, which: str) -> str:
    return expand(builtin("eta"), "00" if which == "A" else "1", n)


def _build_theta(x, y, dx, dy, ix0, jy0, k, s, level, m):
    l = _theta_l(level)
    C = _theta_C(level)
    delta = int(dx.starts[ix0 + s])
    eps = int(dy.starts[jy0 + s])
    swapped = dx.types[ix0 + s] != "B"
    pat1 = C + "1" + C
    pat2 = C + "00" + C
    if not swapped:
        m1, m2 = delta - l, eps - l
        win1, win2, exact = x, y, "x"
    else:
        m1, m2 = eps - l, delta - l
        win1, win2, exact = y, x, "y"
    _verify_pattern(win1, m1, pat1)
    _verify_pattern(win2, m2, pat2)
    case = "THETA_00_vs_1"
    L, M, t, gamma = _intervals(Family.THETA, case, level, m, m1, m2)
    gamma_ok = gamma >= 1 / (4 * (m + 4))
    bounds = (
        abs(m1) <= (m + 3) * (l + 2)
        and abs(m2) <= (m + 3) * (l + 2)
        and 2 * abs(m1 - m2) <= l + 3
        and M[0] >= L[0]
        and M[1] <= L[1]
        and M[0] + t >= L[0]
        and M[1] + t <= L[1]
        and gamma_ok
    )
    return StructureWitness(
        family=Family.THETA.value, n=level, m=m, m1=m1, m2=m2, case=case,
        k_align=k, s_index=s, swapped=swapped,
        branch="s>=0" if s >= 0 else "s<0", exact_side=exact,
        pattern_first=pat1, pattern_second=pat2,
        L=L, M=M, t_shift=t, gamma=gamma, gamma_ok=gamma_ok, bounds_ok=bounds,
    )


_ETA_CASES = {
    "ETA_I": ("ABA", "BBB"),
    "ETA_II": ("BAB", "BBB"),
    "ETA_III": ("AA", "BB"),
}


def _build_eta(x, y, dx, dy, ix0, jy0, k, s, level, m):
    ln = _eta_l(level)
    l1 = _eta_l(level + 1)
    # orient: the formulas put the A_{n+1} block on the "x" side
    if dx.types[ix0 + s] == "A":
        swapped = False
        A_dec, A_idx, A_win, off_A = dx, ix0 + s, x, 0
        B_dec, B_idx, B_win, off_B = dy, jy0 + s, y, k
    else:
        swapped = True
        A_dec, A_idx, A_win, off_A = dy, jy0 + s, y, k
        B_dec, B_idx, B_win, off_B = dx, ix0 + s, x, 0
    i = int(A_dec.starts[A_idx])
    drift = (i + off_A) - (int(B_dec.starts[B_idx]) + off_B)
    if abs(drift) > 1:
        raise VerificationError("mismatching blocks misaligned by more than 1")
    off_B += drift  # the +-1 re-alignment used when s < 0
    kd = off_B - off_A
    if 2 * abs(kd) > l1 + 2:
        raise _Ascend
    if A_idx < 1 or B_idx < 1:
        raise InconclusiveError("no preceding block available for the case analysis")
    prev_A = A_dec.types[A_idx - 1]
    prev_B = B_dec.types[B_idx - 1]
    e8 = 8 * kd
    if -l1 <= e8 < l1:
        case, branch, m1, m2 = "ETA_I", "a", i, i - kd
    elif -3 * l1 <= e8 < -l1:
        case, branch, m1, m2 = "ETA_II", "b", i + ln, i - kd
    elif e8 < -3 * l1:
        if prev_B == "A":
            case, branch, m1, m2 = "ETA_II", "c/pre-A", i + ln, i - kd - ln + 1
        elif prev_A == "B":
            case, branch, m1, m2 = "ETA_III", "c/pre-B,pre-B", i - ln, i - kd - 3 * ln + 2
        else:
            case, branch, m1, m2 = "ETA_I", "c/pre-B,pre-A", i - 2 * ln + 1, i - kd - 4 * ln + 3
    elif l1 <= e8 < 3 * l1:
        if prev_A == "B":
            case, branch, m1, m2 = "ETA_III", "d/pre-B", i - ln, i - kd
        else:
            case, branch, m1, m2 = "ETA_II", "d/pre-A", i - ln + 1, i - kd
    else:  # 3*l1 <= e8 <= 4*l1 (+2 slack from the re-alignment)
        if prev_A == "B":
            case, branch, m1, m2 = "ETA_III", "e/pre-B", i - ln, i - kd + ln - 1
        else:
            case, branch, m1, m2 = "ETA_I", "e/pre-A", i - 2 * ln + 1, i - kd
    w1, w2 = _ETA_CASES[case]
    pat1 = "".join(_eta_block(level, c) for c in w1)
    pat2 = "".join(_eta_block(level, c) for c in w2)
    _verify_pattern(A_win, m1, pat1)
    _verify_pattern(B_win, m2, pat2)
    L, M, t, gamma = _intervals(Family.ETA, case, level, m, m1, m2)
    gamma_ok = gamma > 0
    bounds = (
        abs(m1) <= (m + 3) * l1
        and abs(m2) <= (m + 3) * l1
        and 2 * abs(m1 - m2) <= ln + 4
        and M[0] >= L[0]
        and M[1] <= L[1]
        and M[0] + t >= L[0]
        and M[1] + t <= L[1]
        and gamma_ok
    )
    return StructureWitness(
        family=Family.ETA.value, n=level, m=m, m1=m1, m2=m2, case=case,
        k_align=kd, s_index=s, swapped=swapped, branch=branch,
        exact_side=("x" if swapped else "y"),
        pattern_first=pat1, pattern_second=pat2,
        L=L, M=M, t_shift=t, gamma=gamma, gamma_ok=gamma_ok, bounds_ok=bounds,
    )


def _witness_at_level(fam, x, y, level, m):
    dec_level = level if fam is Family.THETA else level + 1
    dx = decompose(fam, x, dec_level)
    dy = decompose(fam, y, dec_level)
    ix0, jy0, k, s = _aligned_mismatch(dx, dy)
    if abs(s) > m:
        raise _Ascend
    if fam is Family.THETA:
        return _build_theta(x, y, dx, dy, ix0, jy0, k, s, level, m)
    return _build_eta(x, y, dx, dy, ix0, jy0, k, s, level, m)


def find_structure_witness(
    family: Family | str,
    x: SequenceWindow,
    y: SequenceWindow,
    n: int,
    max_level: int | None = None,
    orbit_horizon: int = 32,
) -> StructureWitness:
    """Search levels n, n+1, ... for a structure witness.

    Ascends while the minimal mismatch index |s| exceeds the parse
    threshold m (the proofs' descent), and keeps ascending if the
    gamma requirement fails at the first qualifying level.  Raises
    InvalidInputError on visibly same-orbit inputs, InconclusiveError
    when the windows cannot support any qualifying level.
    """
    fam = _family(family)
    if fam not in _PIECES:
        raise InvalidInputError("structure witnesses support THETA and ETA")
    if n < 1:
        raise InvalidInputError("level must be >= 1")
    try:
        k = same_orbit(x, y, orbit_horizon)
    except InconclusiveError:
        k = None  # not enough overlap to certify either way; proceed
    if k is not None:
        raise InvalidInputError(
            f"windows agree verbatim after shift {k}; same-orbit configuration"
        )
    m = parse_threshold(fam)
    cap = max_level if max_level is not None else n + 12
    best: StructureWitness | None = None
    failure: Exception | None = None
    for level in range(n, cap + 1):
        try:
            wit = _witness_at_level(fam, x, y, level, m)
        except _Ascend:
            continue
        except InconclusiveError as exc:
            failure = exc
            break
        if wit.bounds_ok:
            return wit
        if best is None or wit.gamma > best.gamma:
            best = wit
    if best is not None:
        return best
    raise InconclusiveError(
        f"no structure witness up to level {cap}: {failure or 'no qualifying mismatch'}"
    )
