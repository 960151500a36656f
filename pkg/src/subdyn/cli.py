"""Command-line entry point: reproducible experiments with
machine-readable output.

Exit codes: 0 success, 2 invalid input, 3 verification failure,
4 inconclusive (window / horizon / depth too small).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .errors import InconclusiveError, InvalidInputError, SubdynError, VerificationError
from .hierarchy import Family, SequenceWindow, build_hierarchy, djr_ratio_limit
from .recognizer import find_structure_witness, parse, parse_threshold
from .substitution import (
    builtin,
    expand,
    load_substitution,
    pf_frequencies,
    substitution_matrix,
)
from .tiling import (
    GOLDEN,
    SQRT2M1,
    FlowCylinder,
    TileLengths,
    TilingPoint,
    cylinder_measure,
    default_lengths,
    flow,
)
from .ergodic import (
    birkhoff,
    correlation_profile,
    correlation_sequence,
    default_lambda_grid,
    djr_weak_mixing_experiment,
    joining_estimate,
    rigidity_test,
    spectral_scan,
)

_EXIT = {InvalidInputError: 2, VerificationError: 3, InconclusiveError: 4}


def _parse_alpha(text: str) -> float:
    if text == "golden":
        return GOLDEN
    if text == "sqrt2m1":
        return SQRT2M1
    try:
        value = float(text)
    except ValueError:
        raise InvalidInputError(f"alpha must be 'golden', 'sqrt2m1' or a decimal, not {text!r}")
    if value <= 0:
        raise InvalidInputError("alpha must be positive")
    return value


def _resolve_family(name: str):
    """Return (Family, Substitution | None) for a --family value."""
    if name.startswith("file:"):
        path = name[5:]
        try:
            text = open(path).read()
        except OSError as exc:
            raise InvalidInputError(f"cannot read substitution file {path!r}: {exc}")
        sub = load_substitution(text, name=path)
        return Family.GENERAL_S, sub
    if name == "djr":
        return Family.DJR, None
    if name in ("theta", "eta"):
        return Family.parse(name), builtin(name)
    if name in ("theta-tilde", "eta-tilde"):
        return Family.GENERAL_S, builtin(name)
    raise InvalidInputError(f"unknown family {name!r}")


def _parse_tolerances(items) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in items or ():
        if "=" not in item:
            raise InvalidInputError(f"--tolerance expects K=V, not {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = float(v)
        except ValueError:
            raise InvalidInputError(f"tolerance value {v!r} is not a number")
    return out


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {
            (k if isinstance(k, (str, int, float, bool)) else "|".join(map(str, k))): _jsonable(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Family):
        return obj.value
    if isinstance(obj, float) and (obj != obj):
        return None
    return obj


def _config_hash(config: dict) -> str:
    blob = json.dumps(_jsonable(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _emit(payload: dict, config: dict, emit: str, name: str) -> None:
    record = {"config": _jsonable(config), "result": _jsonable(payload)}
    if emit == "json":
        print(json.dumps(record, indent=2))
        return
    rows = _tabulate(payload)
    if emit == "csv":
        print(",".join(rows[0]))
        for row in rows[1:]:
            print(",".join(str(c) for c in row))
        return
    # gnuplot: deterministic file names derived from the config
    stem = f"subdyn_{name}_{_config_hash(config)}"
    dat, gp = f"{stem}.dat", f"{stem}.gp"
    with open(dat, "w") as fh:
        fh.write("# " + " ".join(rows[0]) + "\n")
        for row in rows[1:]:
            fh.write(" ".join(str(c) for c in row) + "\n")
    with open(gp, "w") as fh:
        fh.write(
            f"set title '{name}'\nset grid\n"
            f"plot '{dat}' using 1:2 with linespoints title '{name}'\n"
        )
    print(json.dumps({"config": _jsonable(config), "files": [dat, gp]}, indent=2))


def _tabulate(payload: dict) -> list:
    """Flatten a result dict into a two-column (or per-series) table."""
    flat = _flatten("", _jsonable(payload))
    return [["key", "value"]] + [[k, v] for k, v in flat]


def _flatten(prefix: str, obj) -> list:
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(f"{prefix}{k}." if prefix else f"{k}.", v) if isinstance(v, (dict, list)) else [(f"{prefix}{k}", v)])
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows.extend(_flatten(f"{prefix}{i}.", v) if isinstance(v, (dict, list)) else [(f"{prefix}{i}", v)])
    else:
        rows.append((prefix.rstrip("."), obj))
    return rows


def _master(fam: Family, sub, window: int) -> str:
    """A deterministic one-sided window of the family's subshift."""
    if fam is Family.DJR:
        from .ergodic import _djr_prefix

        return _djr_prefix(window)[0]
    letter = sub.alphabet[0]
    w = letter
    while len(w) < window:
        w = expand(sub, w)
    return w[:window]


def _require_sub(fam, sub):
    if sub is None:
        raise InvalidInputError("this command needs a substitution family, not 'djr'")
    return sub


# ---------------------------------------------------------------- commands


def _cmd_expand(args, fam, sub, config):
    sub = _require_sub(fam, sub)
    word = expand(sub, args.word, args.power)
    _emit({"word": word, "length": len(word)}, config, args.emit, "expand")


def _cmd_blocks(args, fam, sub, config):
    h = build_hierarchy(fam, args.depth, sub=sub if fam is Family.GENERAL_S else None)
    levels = [
        {"n": lv.n, "l": lv.l, "alpha": lv.alpha, "beta": lv.beta,
         "word": (lv.B if fam is Family.DJR else lv.A) if lv.materialized else None}
        for lv in h.levels
    ]
    if args.emit == "json":
        print(json.dumps({"config": _jsonable(config), "levels": levels}, indent=2))
    else:
        _emit({"levels": levels}, config, args.emit, "blocks")


def _cmd_parse(args, fam, sub, config):
    result = parse(fam, args.word, sub=sub)
    payload = {
        "word": result.word,
        "unique": result.unique,
        "K1": result.K1,
        "items": [list(it) for it in result.items],
        "K2": result.K2,
        "interior": list(result.interior) if result.interior else None,
        "threshold": parse_threshold(fam, sub=sub),
    }
    _emit(payload, config, args.emit, "parse")


def _cmd_structure(args, fam, sub, config):
    if fam not in (Family.THETA, Family.ETA):
        raise InvalidInputError("structure witnesses are implemented for theta and eta")
    n = args.level
    h = build_hierarchy(fam, max(n, 1))
    the_sub = h.sub
    master = expand(the_sub, the_sub.alphabet[0], 12)
    rng = np.random.default_rng(args.seed)
    half = min(40 * (h.level(n).l + 2), len(master) // 8)
    witnesses = []
    for _ in range(args.count):
        cx = int(rng.integers(half, len(master) - half))
        while True:
            cy = int(rng.integers(half, len(master) - half))
            if abs(cx - cy) >= 4 * half:
                break
        x = SequenceWindow(master[cx - half : cx + half + 1], -half)
        y = SequenceWindow(master[cy - half : cy + half + 1], -half)
        w = find_structure_witness(fam, x, y, n)
        witnesses.append(w)
    if any(not w.bounds_ok for w in witnesses):
        raise VerificationError("a structure witness violated its bounds")
    _emit({"witnesses": witnesses}, config, args.emit, "structure")


def _cmd_tiling_measure(args, fam, sub, config):
    sub = _require_sub(fam, sub)
    lo, _, hi = args.interval.partition(":")
    try:
        interval = (float(lo), float(hi))
    except ValueError:
        raise InvalidInputError(f"--interval expects lo:hi, not {args.interval!r}")
    lengths = default_lengths(sub.alphabet, alpha=args.alpha_value)
    cyl = FlowCylinder(args.word, interval)
    value = cylinder_measure(sub, lengths, cyl)
    _emit({"word": args.word, "interval": list(interval), "measure": value},
          config, args.emit, "tiling-measure")


def _cmd_orbit(args, fam, sub, config):
    sub = _require_sub(fam, sub)
    symbols = _master(fam, sub, max(args.window, 10**4))
    lengths = default_lengths(sub.alphabet, alpha=args.alpha_value)
    mid = len(symbols) // 2
    base = SequenceWindow(symbols, -mid, provenance="orbit")
    point = TilingPoint(base, lengths, 0, 0.0)
    step = args.t_max / max(args.samples - 1, 1)
    samples = []
    for i in range(args.samples):
        p = flow(point, i * step)
        samples.append({"t": i * step, "letter": p.letter, "offset": p.offset})
    _emit({"samples": samples}, config, args.emit, "orbit")


def _cmd_freq(args, fam, sub, config):
    symbols = _master(fam, sub, args.window + len(args.word) + 1)
    est = birkhoff(symbols, args.word, window=args.window)
    _emit({"word": args.word, "estimate": est}, config, args.emit, "freq")


def _cmd_correlate(args, fam, sub, config):
    symbols = _master(fam, sub, args.window * 2)
    if args.lags:
        lags = [int(x) for x in args.lags.split(",")]
        out = correlation_sequence(symbols[: args.window * 2], args.word, lags)
        payload = {"word": args.word, "correlations": {str(k): v for k, v in out.items()}}
    else:
        h = build_hierarchy(fam, 8, sub=sub if fam is Family.GENERAL_S else None)
        structured = [
            (lv.l + 2 if fam is Family.THETA else lv.l) if fam is not Family.DJR else lv.l
            for lv in h.levels[2:]
        ]
        structured = [s for s in structured if s < args.window]
        payload = correlation_profile(
            symbols[: args.window * 2], args.word, structured, seed=args.seed
        )
        payload["structured"] = {str(k): v for k, v in payload["structured"].items()}
    _emit(payload, config, args.emit, "correlate")


def _cmd_spectrum(args, fam, sub, config):
    symbols = _master(fam, sub, args.window + len(args.word) + 1)
    grid = default_lambda_grid(alpha=args.alpha_value, seed=args.seed)
    scan = spectral_scan(symbols, args.word, lambdas=grid, window=args.window)
    payload = {
        "word": args.word,
        "window": scan.window,
        "max_off_zero": scan.max_off_zero,
        "peak": list(scan.peak()),
        "lambdas": list(scan.lambdas),
        "amplitudes": list(scan.amplitudes),
    }
    _emit(payload, config, args.emit, "spectrum")


def _cmd_rigidity(args, fam, sub, config):
    symbols = _master(fam, sub, args.window)
    if args.times:
        times = [int(x) for x in args.times.split(",")]
    else:
        hs = [3]
        for n in range(1, 7):
            hs.append(2 ** (n + 1) * hs[-1] + 1)
        times = [t for t in hs[2:6] if t < args.window // 2]
    word = args.word or (build_hierarchy(Family.DJR, 2).level(2).B if fam is Family.DJR else "1")
    res = rigidity_test(symbols, word, times)
    payload = {
        "word": word,
        "mu": res["mu"],
        "ratios": {str(k): v for k, v in res["ratios"].items()},
        "max_ratio": res["max_ratio"],
        "min_ratio": res["min_ratio"],
    }
    _emit(payload, config, args.emit, "rigidity")


def _cmd_joining(args, fam, sub, config):
    symbols = _master(fam, sub, 2 * args.window + abs(args.lag) + 1)
    x = symbols[: args.window]
    y = symbols[args.lag : args.lag + args.window]
    tol = args.tolerances.get("product", None)
    ref = {u: birkhoff(symbols, u).value for u in ("0", "1", "00", "01")} \
        if fam is not Family.GENERAL_S else None
    words = ("0", "1", "00", "01") if ref is not None else tuple(
        dict.fromkeys([sub.alphabet[0], sub.alphabet[1], sub.alphabet[0] * 2, sub.alphabet])
    )
    est = joining_estimate(x, y, words=words, tolerance=tol, reference=ref)
    _emit({"estimate": est}, config, args.emit, "joining")


def _cmd_djr_wm(args, fam, sub, config):
    if fam is not Family.DJR:
        raise InvalidInputError("djr-wm runs on --family djr")
    levels = tuple(int(x) for x in args.levels.split(","))
    res = djr_weak_mixing_experiment(
        n_values=levels, window_chars=args.window,
        lengths=default_lengths(alpha=args.alpha_value),
    )
    res["levels"] = {str(k): v for k, v in res["levels"].items()}
    _emit(res, config, args.emit, "djr-wm")


def _cmd_verify_all(args, fam, sub, config):
    started = time.time()
    checks = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except SubdynError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append({"name": name, "pass": bool(ok), "detail": _jsonable(detail)})

    if fam is Family.DJR:
        def hierarchy_check():
            h = build_hierarchy(fam, args.depth)
            ok = all(
                lv.B is None or (len(lv.B) == lv.l and lv.B.count("0") == lv.alpha)
                for lv in h.levels
            )
            rat = djr_ratio_limit(max(args.depth, 2))
            return ok and rat["monotone_increasing"] and rat["bounded_by_one"], rat["ratios"][-1]

        check("hierarchy-lengths-and-ratios", hierarchy_check)
        check("rigidity-ratios", lambda: (
            (r := rigidity_test(_master(fam, None, max(args.window, 10**6)),
                                build_hierarchy(Family.DJR, 2).level(2).B,
                                [105, 1681]))["max_ratio"] > 0.9, r["max_ratio"]))
    else:
        def hierarchy_check():
            h = build_hierarchy(fam, args.depth, sub=sub if fam is Family.GENERAL_S else None)
            ok = all(lv.l > 0 for lv in h.levels)
            if fam is Family.THETA:
                ok = ok and all(
                    h.levels[i + 1].l == 4 * h.levels[i].l + 4 for i in range(len(h.levels) - 1)
                )
            if fam is Family.ETA:
                ok = ok and all(
                    h.levels[i + 1].l == 4 * h.levels[i].l - 2 for i in range(len(h.levels) - 1)
                )
            return ok, [lv.l for lv in h.levels]

        check("hierarchy-recurrences", hierarchy_check)

        def pf_check():
            fv = pf_frequencies(sub)
            m = substitution_matrix(sub).astype(float)
            resid = float(np.max(np.abs(m @ np.array(fv.frequencies)
                                        - fv.pf_eigenvalue * np.array(fv.frequencies))))
            return resid <= 1e-12, resid

        check("pf-eigenvector-residual", pf_check)

        def parse_check():
            thr = parse_threshold(fam, sub=sub)
            w = expand(sub, sub.alphabet[0], 6)
            probe = w[3 : 3 + max(thr, 20)]
            res = parse(fam, probe, sub=sub)
            return res.unique, {"threshold": thr}

        check("parse-uniqueness-at-threshold", parse_check)

        def measure_check():
            lengths = default_lengths(sub.alphabet, alpha=args.alpha_value)
            total = sum(
                cylinder_measure(sub, lengths, FlowCylinder(a, (0.0, lengths.of(a))))
                for a in sub.alphabet
            )
            return abs(total - 1.0) <= 1e-9, total

        check("tiling-measure-total-mass", measure_check)

        def freq_check():
            symbols = _master(fam, sub, max(args.window, 10**5))
            fv = pf_frequencies(sub)
            worst = 0.0
            for a, f in zip(sub.alphabet, fv.frequencies):
                est = birkhoff(symbols, a)
                worst = max(worst, abs(est.value - f))
            return worst <= 5e-3, worst

        check("letter-frequencies-match-pf", freq_check)

        if fam in (Family.THETA, Family.ETA):
            def witness_check():
                h = build_hierarchy(fam, args.depth)
                master = expand(h.sub, h.sub.alphabet[0], 11)
                half = min(40 * (h.level(min(args.depth, 5)).l + 2), len(master) // 8)
                rng = np.random.default_rng(args.seed)
                cx = int(rng.integers(half, len(master) - half))
                cy = (cx + len(master) // 2) % (len(master) - 2 * half) + half
                x = SequenceWindow(master[cx - half : cx + half + 1], -half)
                y = SequenceWindow(master[cy - half : cy + half + 1], -half)
                w = find_structure_witness(fam, x, y, min(args.depth, 5))
                return w.bounds_ok, {"case": w.case, "gamma": w.gamma}

            check("structure-witness-bounds", witness_check)

    report = {
        "version": __version__,
        "checks": checks,
        "passed": sum(1 for c in checks if c["pass"]),
        "failed": sum(1 for c in checks if not c["pass"]),
        "wall_time_s": round(time.time() - started, 3),
    }
    _emit(report, config, args.emit, "verify-all")
    if report["failed"]:
        raise VerificationError(f"{report['failed']} verification check(s) failed")


# ---------------------------------------------------------------- wiring

_COMMANDS = {
    "expand": _cmd_expand,
    "blocks": _cmd_blocks,
    "parse": _cmd_parse,
    "structure": _cmd_structure,
    "tiling-measure": _cmd_tiling_measure,
    "orbit": _cmd_orbit,
    "freq": _cmd_freq,
    "correlate": _cmd_correlate,
    "spectrum": _cmd_spectrum,
    "rigidity": _cmd_rigidity,
    "joining": _cmd_joining,
    "djr-wm": _cmd_djr_wm,
    "verify-all": _cmd_verify_all,
}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="subdyn", description=__doc__)
    top.add_argument("--version", action="version", version=f"subdyn {__version__}")
    subs = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family", default="theta",
                       help="theta | eta | theta-tilde | eta-tilde | djr | file:<path>")
        p.add_argument("--alpha", default="golden", help="golden | sqrt2m1 | <decimal>")
        p.add_argument("--depth", type=int, default=6)
        p.add_argument("--window", type=int, default=10**5)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--emit", choices=("json", "csv", "gnuplot"), default="json")
        p.add_argument("--tolerance", action="append", metavar="K=V")
        return p

    p = common(subs.add_parser("expand"))
    p.add_argument("--word", required=True)
    p.add_argument("--power", type=int, default=1)

    common(subs.add_parser("blocks"))

    p = common(subs.add_parser("parse"))
    p.add_argument("--word", required=True)

    p = common(subs.add_parser("structure"))
    p.add_argument("--level", type=int, default=5)
    p.add_argument("--count", type=int, default=3)

    p = common(subs.add_parser("tiling-measure"))
    p.add_argument("--word", required=True)
    p.add_argument("--interval", default="0:0.25")

    p = common(subs.add_parser("orbit"))
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--samples", type=int, default=200)

    p = common(subs.add_parser("freq"))
    p.add_argument("--word", required=True)

    p = common(subs.add_parser("correlate"))
    p.add_argument("--word", default="1")
    p.add_argument("--lags", default="")

    p = common(subs.add_parser("spectrum"))
    p.add_argument("--word", default="1")

    p = common(subs.add_parser("rigidity"))
    p.add_argument("--word", default="")
    p.add_argument("--times", default="")

    p = common(subs.add_parser("joining"))
    p.add_argument("--lag", type=int, default=337911)

    p = common(subs.add_parser("djr-wm"))
    p.add_argument("--levels", default="3,4")

    common(subs.add_parser("verify-all"))
    return top


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.window < 10**3:
            raise InvalidInputError("window must be at least 1000")
        args.alpha_value = _parse_alpha(args.alpha)
        args.tolerances = _parse_tolerances(args.tolerance)
        fam, sub = _resolve_family(args.family)
        config = {
            "command": args.command,
            "family": args.family,
            "alpha": args.alpha_value,
            "depth": args.depth,
            "window": args.window,
            "seed": args.seed,
            "emit": args.emit,
            "tolerances": args.tolerances,
            "version": __version__,
        }
        _COMMANDS[args.command](args, fam, sub, config)
        return 0
    except SubdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass, code in _EXIT.items():
            if isinstance(exc, klass):
                return code
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
