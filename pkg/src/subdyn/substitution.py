"""Substitutions on finite alphabets: expansion, matrices, frequencies.

Words are plain Python strings over single-character letters ("0", "1",
"a", "b").  A substitution maps each letter to a nonempty image word; it
extends to words by concatenation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "Substitution",
    "FrequencyVector",
    "expand",
    "substitution_matrix",
    "pf_frequencies",
    "is_primitive",
    "is_admissible",
    "admissible_words",
    "is_aperiodic_class_check",
    "builtin",
    "load_substitution",
    "BUILTIN_NAMES",
]


@dataclass(frozen=True)
class Substitution:
    """A letter-to-word map over a finite alphabet.

    alphabet is a string of distinct single-character letters; images[i]
    is the image of alphabet[i].
    """

    alphabet: str
    images: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise InvalidInputError("alphabet letters must be distinct and nonempty")
        if len(self.images) != len(self.alphabet):
            raise InvalidInputError("need exactly one image per letter")
        for img in self.images:
            if not img:
                raise InvalidInputError("images must be nonempty")
            for c in img:
                if c not in self.alphabet:
                    raise InvalidInputError(f"image symbol {c!r} not in alphabet")

    def image(self, letter: str) -> str:
        try:
            return self.images[self.alphabet.index(letter)]
        except ValueError:
            raise InvalidInputError(f"letter {letter!r} not in alphabet {self.alphabet!r}")

    @property
    def alphabet_size(self) -> int:
        return len(self.alphabet)


@dataclass(frozen=True)
class FrequencyVector:
    """Perron-Frobenius letter frequencies and the PF eigenvalue."""

    frequencies: tuple[float, ...]
    pf_eigenvalue: float


def expand(sub: Substitution, w: str, n: int = 1) -> str:
    """Return the n-th iterated image of w; expand(sub, w, 0) == w."""
    if n < 0:
        raise InvalidInputError("power must be nonnegative")
    for c in w:
        if c not in sub.alphabet:
            raise InvalidInputError(f"symbol {c!r} not in alphabet {sub.alphabet!r}")
    table = {c: sub.image(c) for c in sub.alphabet}
    for _ in range(n):
        w = "".join(table[c] for c in w)
        # one-step table doubling keeps deep expansions cheap
    return w


def substitution_matrix(sub: Substitution) -> np.ndarray:
    """Integer matrix M with M[i, j] = occurrences of letter i in images[j]."""
    k = sub.alphabet_size
    m = np.zeros((k, k), dtype=np.int64)
    for j, img in enumerate(sub.images):
        for c in img:
            m[sub.alphabet.index(c), j] += 1
    return m


def is_primitive(sub: Substitution) -> tuple[bool, int | None]:
    """Whether some power of the matrix is entrywise positive.

    Returns (flag, witness exponent m).  The search is bounded by
    alphabet_size**2, which suffices for primitive matrices.
    """
    m = substitution_matrix(sub)
    power = np.eye(sub.alphabet_size, dtype=np.int64)
    for e in range(1, sub.alphabet_size**2 + 1):
        power = np.minimum(power @ m, 1)  # clip to avoid overflow; positivity only
        if np.all(power > 0):
            return True, e
    return False, None


def pf_frequencies(sub: Substitution, tol: float = 1e-14) -> FrequencyVector:
    """Normalized right PF eigenvector of the substitution matrix.

    Power iteration with a Rayleigh-quotient stopping rule; 2x2 matrices
    are cross-checked against the closed-form quadratic.
    """
    prim, _ = is_primitive(sub)
    if not prim:
        raise InvalidInputError("pf_frequencies requires a primitive substitution")
    m = substitution_matrix(sub).astype(np.float64)
    v = np.full(sub.alphabet_size, 1.0 / sub.alphabet_size)
    lam = 0.0
    for _ in range(10_000):
        w = m @ v
        lam_new = float(v @ w) / float(v @ v)
        w = w / w.sum()
        if abs(lam_new - lam) <= tol and np.max(np.abs(w - v)) <= tol:
            v, lam = w, lam_new
            break
        v, lam = w, lam_new
    if sub.alphabet_size == 2:
        a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        lam_exact = ((a + d) + np.sqrt((a - d) ** 2 + 4 * b * c)) / 2
        if abs(lam - lam_exact) > 1e-9:  # pragma: no cover
            raise InvalidInputError("power iteration disagrees with the 2x2 closed form")
        lam = float(lam_exact)
        # eigenvector from (a - lam) v0 + b v1 = 0
        v = np.array([b, lam - a]) if b != 0 else np.array([lam - d, c])
        v = v / v.sum()
    # final polish so the residual meets the 1e-12 contract
    for _ in range(3):
        w = m @ v
        v = w / w.sum()
        lam = float((m @ v)[0] / v[0]) if v[0] != 0 else lam
    v = v / v.sum()
    return FrequencyVector(tuple(float(x) for x in v), float(lam))


def _stabilization_depth(sub: Substitution, word_len: int) -> int:
    """First power at which every image has length >= 4 * word_len.

    Primitivity makes the set of admissible words of a fixed length
    constant from this depth on, so scans can stop here.
    """
    depth = 1
    while True:
        if all(len(expand(sub, a, depth)) >= 4 * max(word_len, 1) for a in sub.alphabet):
            return depth
        depth += 1
        if depth > 64:
            raise InvalidInputError("substitution grows too slowly; is it erasing?")


@lru_cache(maxsize=64)
def _admissible_pool(sub: Substitution, max_len: int) -> frozenset[str]:
    words: set[str] = set()
    depth = _stabilization_depth(sub, max_len) + 2
    for a in sub.alphabet:
        big = expand(sub, a, depth)
        for length in range(1, max_len + 1):
            for i in range(len(big) - length + 1):
                words.add(big[i : i + length])
    return frozenset(words)


def is_admissible(sub: Substitution, w: str, search_depth: int | None = None) -> bool:
    """Whether w occurs in some iterated image of a letter.

    With search_depth given, scans images up to that power only (the
    spec'd monotone bounded check); otherwise scans to the stabilization
    depth for |w|, which is exact for primitive substitutions.
    """
    if w == "":
        return True
    for c in w:
        if c not in sub.alphabet:
            return False
    if search_depth is None:
        return w in _admissible_pool(sub, max(len(w), 4))
    if search_depth < 1:
        raise InvalidInputError("search_depth must be >= 1")
    return any(w in expand(sub, a, m) for a in sub.alphabet for m in range(1, search_depth + 1))


def admissible_words(sub: Substitution, length: int) -> list[str]:
    """All admissible words of exactly the given length, lexicographic."""
    pool = _admissible_pool(sub, length)
    return sorted(w for w in pool if len(w) == length)


def is_aperiodic_class_check(sub: Substitution, max_period: int = 100) -> bool:
    """Aperiodicity for the class s(a) = aA, s(b) = bA with a common tail A.

    For a period k, both occurrences of a-started and b-started blocks
    would force the letter k positions after a block start to equal the
    start letter.  Taking N with len(s^N(a)) > k, that letter is
    s^N(a)[k] == s^N(b)[k] (the common tail), so it cannot be both 'a'
    and 'b': every k is excluded.  This function runs that exclusion
    constructively for each k <= max_period.
    """
    if sub.alphabet_size != 2:
        raise InvalidInputError("class check needs a two-letter alphabet")
    a, b = sub.alphabet
    ia, ib = sub.images
    if len(ia) != len(ib) or len(ia) < 2:
        raise InvalidInputError("images must be constant length > 1")
    if not (ia[0] == a and ib[0] == b and ia[1:] == ib[1:]):
        raise InvalidInputError("substitution is not of the shape s(a)=aA, s(b)=bA")
    for k in range(1, max_period + 1):
        n = 0
        while len(expand(sub, a, n)) <= k:
            n += 1
        sa, sb = expand(sub, a, n), expand(sub, b, n)
        if sa[k] != sb[k]:
            # tails differ: the contradiction argument would not close
            return False
        # s^n(a)[k] == s^n(b)[k], so period k would need that common
        # letter to equal both 'a' and 'b': k is excluded.
        if sa[k] == a and sb[k] == b:  # unreachable given equality; belt and braces
            return False
    return True


_BUILTINS = {
    "theta": Substitution("01", ("001", "11001"), "theta"),
    "eta": Substitution("01", ("001", "11100"), "eta"),
    "theta-tilde": Substitution("ab", ("abab", "bbab"), "theta-tilde"),
    "eta-tilde": Substitution("ab", ("abab", "bbba"), "eta-tilde"),
}

BUILTIN_NAMES = tuple(_BUILTINS) + ("djr",)


def builtin(name: str) -> Substitution:
    """Look up a named built-in substitution.

    'djr' names the section-5 rank-one block system, which is not
    generated by a substitution; asking for it here is an error (use the
    hierarchy module).
    """
    if name == "djr":
        raise InvalidInputError("'djr' is a block system, not a substitution; use the DJR hierarchy")
    try:
        return _BUILTINS[name]
    except KeyError:
        raise InvalidInputError(f"unknown substitution {name!r}; built-ins: {', '.join(BUILTIN_NAMES)}")


def load_substitution(text: str, name: str = "custom") -> Substitution:
    """Parse the `letter -> image` line format into a Substitution."""
    rules: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            raise InvalidInputError(f"bad rule line: {raw!r}")
        lhs, rhs = (part.strip() for part in line.split("->", 1))
        if len(lhs) != 1 or not rhs:
            raise InvalidInputError(f"bad rule line: {raw!r}")
        if lhs in rules:
            raise InvalidInputError(f"duplicate rule for {lhs!r}")
        rules[lhs] = rhs
    if not rules:
        raise InvalidInputError("no rules found")
    alphabet = "".join(rules)
    return Substitution(alphabet, tuple(rules[c] for c in alphabet), name)
