"""``ltdps`` command: generate | predict | eval | secure-demo."""
from __future__ import annotations

import argparse
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ENV_VAR, Settings, describe_keys, load_config, with_overrides
from .estimators import LTDPSPredictor
from .evaluation import run_experiment
from .grid import GridTopology
from .exceptions import ConfigError, LTDPSError
from .paths import gen_history, read_history, write_history
from .security import (MobileNodeEndpoint, ServerEndpoint, SubstitutionCipher, TripleDESCipher,
                       XorCipher, run_handshake, run_server_handshake)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("ltdps")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _id(prefix):
    def conv(text):
        m = re.fullmatch(rf"(?:{prefix})?(\d+)", text.strip(), re.IGNORECASE)
        if not m:
            raise argparse.ArgumentTypeError(f"expected a number or {prefix}<number>, got {text!r}")
        return int(m.group(1))
    return conv


def build_parser() -> argparse.ArgumentParser:
    epilog = describe_keys() + f"\n\nThe config file defaults to ${ENV_VAR} when --config is absent."
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"key = value file (default: ${ENV_VAR})")
    common.add_argument("--seed", type=int, help="override the seed key")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    fmt = argparse.RawDescriptionHelpFormatter
    p = _Parser(prog="ltdps", description="Hybrid location-tracking and data-mining "
                "mobility prediction simulator.", epilog=epilog, formatter_class=fmt)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic path history",
                       epilog=epilog, formatter_class=fmt)
    g.add_argument("out", nargs="?", help="history file (default: history_file key)")
    g.add_argument("--count", type=int, help="number of paths (default: history_size key)")

    q = sub.add_parser("predict", parents=[common], help="predict the next AP from a history",
                       epilog=epilog, formatter_class=fmt)
    q.add_argument("history", help="path-history file")
    q.add_argument("from_ap", type=_id("AP"), help="current AP, e.g. 19 or AP19")
    q.add_argument("to_region", type=_id("R"), help="region being entered, e.g. 15 or R15")
    q.add_argument("--corruption-factor", type=float)

    e = sub.add_parser("eval", parents=[common], help="score LTDPS against the baselines",
                       epilog=epilog, formatter_class=fmt)
    e.add_argument("--schemes", help="comma-separated subset of LTDPS,TM,IP")
    e.add_argument("--runs", type=int, help="number of seeded runs")
    e.add_argument("--jobs", type=int, default=1, help="worker processes for multiple runs")
    e.add_argument("--history", help="use this history file instead of generating one")
    e.add_argument("--out", help="report directory (default: output_dir key)")
    e.add_argument("--history-size", type=int)
    e.add_argument("--test-paths", type=int)

    s = sub.add_parser("secure-demo", parents=[common], help="run the authenticated report exchange",
                       epilog=epilog, formatter_class=fmt)
    s.add_argument("--key", help="shared key as hex (8 bytes, 24 for 3des)")
    s.add_argument("--cipher", choices=("substitution", "xor", "3des"))
    s.add_argument("--tamper-bit", type=int, help="flip this bit of Message_2 (or the server message) in flight")
    s.add_argument("--replay", action="store_true", help="replay Message_2 after the exchange")
    s.add_argument("--server-initiated", action="store_true",
                   help="run the two-packet server-initiated exchange instead")
    return p


def _settings(args, **over) -> Settings:
    return with_overrides(load_config(args.config), seed=args.seed, **over)


def cmd_generate(args) -> int:
    st = _settings(args)
    n = args.count if args.count is not None else st.history_size
    if n < 0:
        raise UsageError("--count must be >= 0")
    exp = st.experiment()
    rng = np.random.default_rng(np.random.SeedSequence(st.seed).spawn(3)[0])
    paths = gen_history(n, exp.grid, exp.path_len_range, rng, **exp.generator_kwargs())
    out = args.out or st.history_file
    count = write_history(out, paths)
    print(f"wrote {count} paths to {out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    st = _settings(args, corruption_factor=args.corruption_factor)
    history = read_history(args.history, GridTopology(st.ap_rows, st.ap_cols))
    model = LTDPSPredictor(st.corruption_factor, st.ap_rows, st.ap_cols).fit(history)
    res = model.predict_one(args.from_ap, args.to_region)
    print(f"history: {len(history)} paths")
    print(f"S = {{{', '.join(str(a) for a in res.candidates)}}}")
    for ap, score in res.ranking:
        print(f"  AP{ap}: {score:g}")
    print(f"predicted: AP{res.predicted_ap} ({res.method})")
    return EXIT_OK


def _one_run(st: Settings, seed: int, history, out_dir):
    report = run_experiment(st.experiment(seed), history)
    report.write_csv(out_dir)
    return seed, {s: report.mean_accuracy(s) for s in report.results}


def cmd_eval(args) -> int:
    st = _settings(args, schemes=args.schemes, runs=args.runs,
                   history_size=args.history_size, test_paths=args.test_paths)
    history = read_history(args.history, GridTopology(st.ap_rows, st.ap_cols)) if args.history else None
    out = Path(args.out or st.output_dir)
    seeds = [st.seed + k for k in range(st.runs)]
    dirs = [out if st.runs == 1 else out / f"seed_{s}" for s in seeds]
    if args.jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_one_run, [st] * len(seeds), seeds, [history] * len(seeds), dirs))
    else:
        rows = [_one_run(st, s, history, d) for s, d in zip(seeds, dirs)]
    schemes = list(rows[0][1])
    print("seed  " + "  ".join(f"{s:>7}" for s in schemes))
    for seed, means in rows:
        print(f"{seed:<5} " + "  ".join(f"{100 * means[s]:6.1f}%" for s in schemes))
    if len(rows) > 1:
        avg = {s: sum(m[s] for _, m in rows) / len(rows) for s in schemes}
        print("mean  " + "  ".join(f"{100 * avg[s]:6.1f}%" for s in schemes))
    print(f"reports written under {out}")
    return EXIT_OK


_CIPHERS = {"substitution": SubstitutionCipher, "xor": XorCipher, "3des": TripleDESCipher}


def cmd_secure_demo(args) -> int:
    st = _settings(args, cipher=args.cipher)
    cipher = _CIPHERS[st.cipher]()
    if args.key is None:
        key = bytes(range(1, cipher.key_size + 1))
    else:
        try:
            key = bytes.fromhex(args.key)
        except ValueError:
            raise UsageError(f"--key is not valid hex: {args.key!r}") from None
        if len(key) != cipher.key_size:
            raise UsageError(f"--key must be {cipher.key_size} bytes for {st.cipher}, got {len(key)}")
    rng = np.random.default_rng(st.seed)
    mn = MobileNodeEndpoint(7, key, cipher)
    server = ServerEndpoint({7: key}, cipher, rng)

    adversary = None
    if args.tamper_bit is not None:
        bit = args.tamper_bit
        victim = "Message" if args.server_initiated else "Message_2"

        def adversary(label, data):
            if label != victim:
                return data
            if not 0 <= bit < 8 * len(data):
                raise UsageError(f"--tamper-bit must be below {8 * len(data)}")
            buf = bytearray(data)
            buf[bit // 8] ^= 0x80 >> (bit % 8)
            return bytes(buf)

    if args.server_initiated:
        tr = run_server_handshake(server, mn, b"reserve AP7", adversary)
    else:
        reports = [bytes([1, 30, 3, 0, 20, 5, 10, 6, 5]), bytes([1, 38, 3, 0, 5, 5, 15, 6, 25])]
        tr = run_handshake(mn, server, reports, adversary, replay=args.replay)
    print(tr)
    print("verdicts: " + " ".join(v.value for v in tr.verdicts))
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "predict": cmd_predict, "eval": cmd_eval,
            "secure-demo": cmd_secure_demo}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"ltdps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LTDPSError, ValueError, OSError) as exc:
        print(f"ltdps: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
