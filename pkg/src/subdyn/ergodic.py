"""Empirical ergodic-theory experiments on symbolic windows.

Everything here estimates measures, correlations, spectral amplitudes,
rigidity ratios and joining statistics from finite windows; each
estimate carries a spread-based standard-error proxy so callers can
judge whether a comparison is resolvable at the window size used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InconclusiveError, InvalidInputError, VerificationError
from .hierarchy import SequenceWindow, count_occurrences
from .tiling import GOLDEN, TileLengths, TilingPoint, default_lengths, flow_exact

__all__ = [
    "MeasureEstimate",
    "SpectralScan",
    "JoiningEstimate",
    "occurrence_indicator",
    "birkhoff",
    "correlation_sequence",
    "correlation_profile",
    "default_lambda_grid",
    "spectral_scan",
    "rotation_coding",
    "rigidity_test",
    "flow_return_ratio",
    "djr_weak_mixing_experiment",
    "joining_estimate",
    "t_alpha_ergodicity_probe",
]


@dataclass(frozen=True)
class MeasureEstimate:
    """An empirical frequency with a four-quarter spread error proxy."""

    value: float
    window: int
    stderr_proxy: float

    def consistent_with(self, other: "MeasureEstimate", sigmas: float = 3.0) -> bool:
        spread = sigmas * (self.stderr_proxy + other.stderr_proxy)
        return abs(self.value - other.value) <= max(spread, 1e-15)


def occurrence_indicator(symbols: str, word: str) -> np.ndarray:
    """Boolean array: position i holds iff word occurs at i (overlaps
    counted; length len(symbols) - len(word) + 1)."""
    if not word:
        raise InvalidInputError("empty word")
    if len(word) > len(symbols):
        raise InconclusiveError("window shorter than the word")
    arr = np.frombuffer(symbols.encode(), dtype=np.uint8)
    n = len(arr) - len(word) + 1
    mask = np.ones(n, dtype=bool)
    for j, c in enumerate(word):
        mask &= arr[j : j + n] == ord(c)
    return mask


def _quarter_stderr(values: np.ndarray) -> float:
    """Spread of four consecutive-quarter means, as a stderr proxy."""
    n = len(values)
    if n < 8:
        return float("inf")
    q = n // 4
    means = [float(values[i * q : (i + 1) * q].mean()) for i in range(4)]
    return float(np.std(means, ddof=1) / 2.0)


def birkhoff(symbols: str, word: str, window: int | None = None) -> MeasureEstimate:
    """Empirical frequency of word over the first `window` positions."""
    ind = occurrence_indicator(symbols, word)
    if window is not None:
        if window < 1:
            raise InvalidInputError("window must be positive")
        if window > len(ind):
            raise InconclusiveError("requested window exceeds the available symbols")
        ind = ind[:window]
    return MeasureEstimate(float(ind.mean()), len(ind), _quarter_stderr(ind))


def correlation_sequence(symbols: str, word: str, lags) -> dict[int, float]:
    """lag -> empirical frequency of (word at i) and (word at i + lag)."""
    ind = occurrence_indicator(symbols, word)
    out: dict[int, float] = {}
    for lag in lags:
        k = int(lag)
        if k < 0:
            raise InvalidInputError("lags must be nonnegative")
        if k >= len(ind):
            raise InconclusiveError(f"lag {k} exceeds the window")
        out[k] = float((ind[: len(ind) - k] & ind[k:]).mean()) if k else float(ind.mean())
    return out


def correlation_profile(
    symbols: str,
    word: str,
    structured_lags,
    n_random: int = 200,
    seed: int = 42,
    random_range: tuple[int, int] | None = None,
) -> dict:
    """Correlations at structured lags versus the mean over random lags.

    The random-lag mean estimates the product level mu^2; structured
    lags that sit well above it witness non-mixing-like alignment.
    """
    ind = occurrence_indicator(symbols, word)
    mu = float(ind.mean())
    structured = correlation_sequence(symbols, word, structured_lags)
    lo, hi = random_range if random_range else (len(word), len(ind) // 2)
    rng = np.random.default_rng(seed)
    lags = rng.integers(lo, hi, size=n_random)
    vals = [float((ind[: len(ind) - k] & ind[k:]).mean()) for k in lags]
    return {
        "mu": mu,
        "mu_squared": mu * mu,
        "structured": structured,
        "random_lag_mean": float(np.mean(vals)),
        "random_lag_std": float(np.std(vals)),
        "n_random": n_random,
        "window": len(ind),
    }


def default_lambda_grid(
    alpha: float = GOLDEN, seed: int = 42, max_q: int = 16, n_uniform: int = 64
) -> np.ndarray:
    """Frequencies to scan: rationals p/q (q <= max_q), uniform draws,
    and the suspension-related values 1/alpha and 1/(1+alpha), mod 1."""
    vals = {0.0}
    for q in range(1, max_q + 1):
        for p in range(1, q):
            vals.add(p / q)
    vals.add(alpha % 1.0)
    vals.add((1.0 / alpha) % 1.0)
    vals.add((1.0 / (1.0 + alpha)) % 1.0)
    rng = np.random.default_rng(seed)
    vals.update(rng.random(n_uniform).tolist())
    return np.array(sorted(vals))


@dataclass(frozen=True)
class SpectralScan:
    """Weyl-sum amplitudes |sum_i 1_[u](T^i x) e^{-2 pi i lambda i}| / N."""

    word: str
    window: int
    lambdas: tuple[float, ...]
    amplitudes: tuple[float, ...]

    @property
    def max_off_zero(self) -> float:
        return max(
            (a for lam, a in zip(self.lambdas, self.amplitudes) if lam != 0.0),
            default=0.0,
        )

    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.amplitudes))
        return self.lambdas[i], self.amplitudes[i]


def spectral_scan(
    symbols: str,
    word: str,
    lambdas=None,
    window: int | None = None,
    alpha: float = GOLDEN,
    seed: int = 42,
) -> SpectralScan:
    """Scan Weyl sums of the word's occurrence indicator.

    amplitude(0) equals the Birkhoff frequency exactly.  For weakly
    mixing systems the off-zero amplitudes decay with the window; a
    point eigenvalue shows up as a non-decaying peak.
    """
    ind = occurrence_indicator(symbols, word)
    if window is not None:
        if window > len(ind):
            raise InconclusiveError("requested window exceeds the available symbols")
        ind = ind[:window]
    if lambdas is None:
        lambdas = default_lambda_grid(alpha=alpha, seed=seed)
    lambdas = np.asarray(list(lambdas), dtype=np.float64)
    pos = np.nonzero(ind)[0].astype(np.float64)
    n = len(ind)
    amps = np.empty(len(lambdas))
    for i, lam in enumerate(lambdas):
        phases = -2.0 * np.pi * lam * pos
        amps[i] = abs(np.cos(phases).sum() + 1j * np.sin(phases).sum()) / n
    return SpectralScan(word, n, tuple(lambdas.tolist()), tuple(amps.tolist()))


def rotation_coding(alpha: float, length: int, x0: float = 0.0) -> str:
    """Two-interval coding of the rotation by alpha (a point-spectrum
    control for the spectral scan: the peak at lambda = alpha persists)."""
    if length < 1:
        raise InvalidInputError("length must be positive")
    orbit = (x0 + alpha * np.arange(length)) % 1.0
    return "".join(np.where(orbit < alpha, "1", "0").tolist())


def rigidity_test(
    symbols: str,
    word: str,
    times,
    min_mu_sigmas: float = 10.0,
) -> dict:
    """Return ratios mu(A and T^-t A) / mu(A) for A = [word].

    Values near 1 witness rigidity along the given times; values near
    mu(A) sit at the product (mixing-like) level.  Raises when mu(A) is
    not resolved at the window size.
    """
    est = birkhoff(symbols, word)
    if est.value <= 0 or est.value < min_mu_sigmas * est.stderr_proxy:
        raise InconclusiveError("cylinder frequency not resolved at this window size")
    ind = occurrence_indicator(symbols, word)
    ratios: dict[int, float] = {}
    for t in times:
        k = int(t)
        if not 0 < k < len(ind):
            raise InconclusiveError(f"time {k} exceeds the window")
        ratios[k] = float((ind[: len(ind) - k] & ind[k:]).mean()) / est.value
    return {
        "mu": est,
        "ratios": ratios,
        "max_ratio": max(ratios.values()),
        "min_ratio": min(ratios.values()),
    }


def _merge_intervals(starts: np.ndarray, length: float):
    """Union of [s, s+length) for sorted starts as disjoint intervals."""
    ends = starts + length
    out_s, out_e = [], []
    cs, ce = starts[0], ends[0]
    for s, e in zip(starts[1:], ends[1:]):
        if s < ce:
            ce = max(ce, e)
        else:
            out_s.append(cs)
            out_e.append(ce)
            cs, ce = s, e
    out_s.append(cs)
    out_e.append(ce)
    return np.array(out_s), np.array(out_e)


def _intersection_length(a, b) -> float:
    """Total overlap of two disjoint sorted interval lists."""
    (as_, ae), (bs, be) = a, b
    i = j = 0
    total = 0.0
    while i < len(as_) and j < len(bs):
        lo = max(as_[i], bs[j])
        hi = min(ae[i], be[j])
        if hi > lo:
            total += hi - lo
        if ae[i] <= be[j]:
            i += 1
        else:
            j += 1
    return total


def flow_return_ratio(
    symbols: str,
    lengths: TileLengths,
    word: str,
    t: float,
    interval: float | None = None,
) -> float:
    """nu(A and flow_{-t} A) / nu(A) for A = [word] x [0, interval).

    Deterministic interval-intersection estimate over one window: visit
    times are the exact boundary positions of the word's occurrences.
    """
    arr = np.frombuffer(symbols.encode(), dtype=np.uint8)
    per = np.zeros(len(arr))
    for letter, length in zip(lengths.alphabet, lengths.lengths):
        per[arr == ord(letter)] = length
    if np.any(per == 0):
        raise InvalidInputError("window contains letters without a tile length")
    bounds = np.concatenate(([0.0], np.cumsum(per)))
    ind = occurrence_indicator(symbols, word)
    starts = bounds[np.nonzero(ind)[0]]
    if len(starts) == 0:
        raise InconclusiveError("word does not occur in the window")
    r = interval if interval is not None else lengths.of(word[0])
    # condition on visits whose return stays inside the window, so large
    # shifts are not biased down by edge truncation
    span = float(bounds[-1])
    if t >= 0:
        valid = starts[starts + t + r <= span]
    else:
        valid = starts[starts + t >= 0.0]
    if len(valid) == 0:
        raise InconclusiveError("shift leaves no observable returns in the window")
    A = _merge_intervals(valid, r)
    shifted = _merge_intervals(starts - t, r)
    total = float(np.sum(A[1] - A[0]))
    return _intersection_length(A, shifted) / total


def _djr_words(max_chars: int):
    """Materialized B_n words and exact (h, alpha, beta) out to depth 8."""
    words = {1: "010"}
    stats = {1: (3, 2, 1)}
    for n in range(1, 9):
        h, al, be = stats[n]
        stats[n + 1] = (2 ** (n + 1) * h + 1, 2 ** (n + 1) * al, 1 + 2 ** (n + 1) * be)
        if n in words and stats[n + 1][0] <= max_chars:
            words[n + 1] = words[n] * 2**n + "1" + words[n] * 2**n
    return words, stats


def _djr_prefix(length: int):
    """A true prefix of the one-sided rank-one sequence, of the given
    length.  B_{n+1} = B_n^{2^n} 1 B_n^{2^n}, so the prefix is repeats of
    the deepest materialized block with junction 1s where levels close."""
    words, stats = _djr_words(max(length, 10**4))
    n = max(words)
    cur = words[n]
    while len(cur) < length:
        half = 2**n * len(cur)
        if length <= half:
            reps = -(-length // len(cur))
            cur = (cur * reps)[:length]
        elif length <= 2 * half + 1:
            rem = length - half - 1
            reps = -(-rem // len(cur)) if rem else 0
            cur = cur * 2**n + "1" + (cur * reps)[:rem]
        else:
            cur = cur * 2**n + "1" + cur * 2**n
            n += 1
    return cur[:length], words, stats


def djr_weak_mixing_experiment(
    n_values=(3, 4, 5),
    window_chars: int = 6 * 10**7,
    lengths: TileLengths | None = None,
) -> dict:
    """Suspension-flow evidence against eigenvalues for the rank-one system.

    For each n estimates the flow measure of E_n = [B_{n+1}] x [0, 2^n t_n)
    and of the adjacent-pair set F_n based on [B_{n+1} B_{n+1}], both of
    which stay bounded below by ~d/2 where d = lim t_n/h_n / mean tile
    length; an eigenvalue would force one of them to vanish.  Also
    certifies that the single 1 inserted between the two halves of
    B_{n+1} displaces the second half by exactly one J_1 tile.
    """
    if lengths is None:
        lengths = default_lengths()
    j0, j1 = lengths.lengths
    win, words, stats = _djr_prefix(window_chars)
    zeros = win.count("0")
    total_time = zeros * j0 + (len(win) - zeros) * j1

    deep = max(stats)
    h_d, al_d, be_d = stats[deep]
    c = (al_d * j0 + be_d * j1) / h_d  # t_n / h_n limit
    mu0 = al_d / h_d
    norm = mu0 * j0 + (1 - mu0) * j1
    d = c / norm

    out = {"d": d, "window_chars": window_chars, "levels": {}}
    for n in n_values:
        if n + 1 not in words:
            raise InconclusiveError(f"B_{n + 1} exceeds the materialization budget")
        B1 = words[n + 1]
        h_n, al_n, be_n = stats[n]
        t_n = al_n * j0 + be_n * j1
        interval = 2**n * t_n
        occ_single = count_occurrences(win, B1)
        occ_pair = count_occurrences(win, B1 + B1)
        nu_E = occ_single * interval / total_time
        nu_F = occ_pair * interval / total_time
        # the inserted 1: B_{n+1} = B_n^{2^n} 1 B_n^{2^n}; flowing off the
        # inserted tile is a displacement of exactly one J_1 tile
        half_len = 2**n * h_n
        base = SequenceWindow(B1, -half_len, provenance=f"B_{n + 1} at the inserted 1")
        at_one = TilingPoint(base, lengths, 0, 0.0)
        landed = flow_exact(at_one, (0, 1))
        if landed.tile_index != 1 or base.slice(1, 1 + h_n) != words[n]:
            raise VerificationError("inserted-1 displacement is not one J_1 tile")
        displacement = (0, 1)
        out["levels"][n] = {
            "nu_E": nu_E,
            "nu_F": nu_F,
            "threshold": 0.45 * d,
            "occurrences": occ_single,
            "pair_occurrences": occ_pair,
            "interval": interval,
            "inserted_one_displacement": displacement,
        }
    return out


OFF_DIAGONAL = "OFF_DIAGONAL"
PRODUCT_CONSISTENT = "PRODUCT_CONSISTENT"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class JoiningEstimate:
    """Empirical classification of the joining generated by a pair."""

    classification: str
    offset: int | None
    max_deviation: float
    tolerance: float
    window: int
    pair_frequencies: dict = field(default_factory=dict)
    marginal_deviation: float = 0.0


def joining_estimate(
    x: str,
    y: str,
    words=("0", "1", "00", "01"),
    window: int | None = None,
    max_offset: int = 50,
    tolerance: float | None = None,
    reference: dict[str, float] | None = None,
    marginal_tolerance: float = 1e-3,
) -> JoiningEstimate:
    """Classify the pair empirical joining of two windows.

    If y is a shift of x by |k| <= max_offset (verified exactly on the
    overlap) the joining is off-diagonal.  Otherwise the joint word
    frequencies are compared against products of marginals.
    """
    n = min(len(x), len(y))
    if window is not None:
        if window > n:
            raise InconclusiveError("requested window exceeds the available symbols")
        n = window
    x, y = x[:n], y[:n]
    for k in sorted(range(-max_offset, max_offset + 1), key=lambda v: (abs(v), v < 0)):
        if k >= 0:
            ok = n > k and x[k:] == y[: n - k]
        else:
            ok = n > -k and y[-k:] == x[: n + k]
        if ok:
            tol = tolerance if tolerance is not None else max(0.02, 10 / math.sqrt(n))
            return JoiningEstimate(OFF_DIAGONAL, k, 0.0, tol, n)
    tol = tolerance if tolerance is not None else max(0.02, 10 / math.sqrt(n))
    pair_freqs: dict = {}
    devs = []
    marg_dev = 0.0
    margs = {}
    for side, s in (("x", x), ("y", y)):
        for u in words:
            margs[(side, u)] = occurrence_indicator(s, u)
            if reference is not None and u in reference:
                marg_dev = max(marg_dev, abs(float(margs[(side, u)].mean()) - reference[u]))
    for u in words:
        iu = margs[("x", u)]
        for v in words:
            iv = margs[("y", v)]
            m = min(len(iu), len(iv))
            joint = float((iu[:m] & iv[:m]).mean())
            prod = float(iu.mean()) * float(iv.mean())
            pair_freqs[(u, v)] = joint
            devs.append(abs(joint - prod))
    max_dev = max(devs)
    if marg_dev > marginal_tolerance:
        cls = INCONCLUSIVE
    else:
        cls = PRODUCT_CONSISTENT if max_dev < tol else INCONCLUSIVE
    return JoiningEstimate(cls, None, max_dev, tol, n, pair_freqs, marg_dev)


def t_alpha_ergodicity_probe(
    symbols: str,
    lengths: TileLengths,
    word: str,
    step: float,
    n_steps: int,
    starts: tuple[float, float] = (0.0, None),
    sigmas: float = 3.0,
) -> dict:
    """Sample the flow at times start + j*step from two starting points;
    under unique ergodicity both visit frequencies agree."""
    arr = np.frombuffer(symbols.encode(), dtype=np.uint8)
    per = np.zeros(len(arr))
    for letter, length in zip(lengths.alphabet, lengths.lengths):
        per[arr == ord(letter)] = length
    bounds = np.concatenate(([0.0], np.cumsum(per)))
    ind = occurrence_indicator(symbols, word)
    span = bounds[-1]
    s0, s1 = starts
    if s1 is None:
        s1 = span / math.pi  # an unrelated generic start
    estimates = []
    for s in (s0, s1):
        times = s + step * np.arange(n_steps)
        if times[-1] >= span or times[0] < 0:
            raise InconclusiveError("orbit sample leaves the window support")
        tiles = np.searchsorted(bounds, times, side="right") - 1
        hits = (tiles < len(ind)) & ind[np.minimum(tiles, len(ind) - 1)]
        estimates.append(MeasureEstimate(float(hits.mean()), n_steps, _quarter_stderr(hits)))
    a, b = estimates
    return {
        "estimates": (a, b),
        "consistent": a.consistent_with(b, sigmas=sigmas),
        "difference": abs(a.value - b.value),
    }
