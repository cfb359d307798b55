"""Command-line entry point ``hdcb``.

Every run writes its primary output file, optional JSON summary, and a
``<stem>.manifest.json`` holding the fully resolved configuration.
``hdcb --from-manifest FILE`` replays a run with exactly that configuration.

Option values resolve in this order: built-in default, ``--config`` file
(``key = value`` lines), ``HDCB_<OPTION>`` environment variables, command
line flags.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time
import warnings
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .errors import ConfigError, DataError, HDCError, UnsupportedOperationError
from .spaces import VsaConfig, VsaKind

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

ENV_PREFIX = "HDCB_"

# built-in defaults per command; None means "required" or "not applicable"
COMMON_DEFAULTS = {
    "kind": None,
    "dim": None,
    "density": None,
    "seed": 0,
    "repeats": None,
    "out": None,
    "threads": None,
    "fast": False,
}

COMMAND_DEFAULTS: dict[str, dict] = {
    "capacity": {"kind": "FHRR", "repeats": 10, "items": 1000, "dims": "sq:2-34", "ks": "2-50",
                 "threshold": 0.99},
    "pairs": {"kind": "FHRR", "repeats": 10, "items": 1000, "dims": "sq:2-34", "ks": "2-50",
              "threshold": 0.99},
    "itemmem-sweep": {"kind": "FHRR", "repeats": 10, "k": 10, "ns": "10,100,1000,10000",
                      "dims": "sq:2-34", "threshold": 0.99},
    "approx-unbind": {"kinds": "MAP-C,HRR,VTB", "dim": 1024, "n_max": 40, "repeats": 20},
    "reason dollar-of-mexico": {"kind": "MAP-B", "dim": 2048, "trials": 100, "path": "auto",
                                "distractors": 97, "no_clean": False},
    "langrec make-corpus": {"languages": 5, "train": 200, "test": 50},
    "langrec train": {"kind": "FHRR", "dim": 2000, "n": 3, "corpus": None},
    "langrec eval": {"model": None, "corpus": None},
    "placerec": {"kind": "HRR", "dim": 4096, "seqlen": 5, "mode": "all", "db": None,
                 "query": None, "gt": None, "synthetic": False, "rows": 200, "noise": 10.0,
                 "fixture_cols": 1024, "write_fixture": None, "dump_similarity": None},
    "selftest": {},
}

FAST_OVERRIDES = {
    "capacity": {"repeats": 3, "dims": "sq:2-34:4"},
    "pairs": {"repeats": 3, "dims": "sq:2-34:4"},
    "itemmem-sweep": {"repeats": 3, "dims": "sq:2-34:4", "ns": "10,100,1000"},
    "approx-unbind": {"repeats": 5},
    "reason dollar-of-mexico": {"trials": 20},
    "langrec make-corpus": {"train": 60, "test": 20},
}

DEFAULT_OUT = {
    "capacity": "capacity.csv",
    "pairs": "pairs.csv",
    "itemmem-sweep": "itemmem_sweep.csv",
    "approx-unbind": "approx_unbind.csv",
    "reason dollar-of-mexico": "dollar_of_mexico.csv",
    "langrec make-corpus": "corpus",
    "langrec train": "model.hvm",
    "langrec eval": "langrec_eval.csv",
    "placerec": "placerec.csv",
    "selftest": "selftest.csv",
}


class UsageError(ConfigError):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"error: {message}")


# --------------------------------------------------------------------------
# value parsing


def parse_int_list(text: str) -> list[int]:
    """Integers from ``"4,9,16"``, ``"2-50"``, ``"2-50:4"`` or ``"sq:2-34[:4]"`` (squares)."""
    text = str(text).strip()
    square = text.startswith("sq:")
    if square:
        text = text[3:]
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            step = 1
            if ":" in part:
                part, s = part.split(":")
                step = int(s)
            if "-" in part[1:]:
                a, b = part.split("-", 1)
                out.extend(range(int(a), int(b) + 1, step))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None
    if not out:
        raise ConfigError("empty integer list")
    return [i * i for i in out] if square else out


def _to_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


COERCE: dict[str, Callable] = {
    "dim": int, "seed": int, "repeats": int, "threads": int, "items": int, "k": int,
    "n_max": int, "trials": int, "distractors": int, "n": int, "languages": int,
    "train": int, "test": int, "seqlen": int, "rows": int, "fixture_cols": int,
    "density": float, "threshold": float, "noise": float,
    "fast": _to_bool, "no_clean": _to_bool, "synthetic": _to_bool,
}


def _coerce(key: str, value):
    if value is None:
        return None
    fn = COERCE.get(key)
    if fn is None:
        return str(value)
    try:
        return fn(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {value!r}") from None


def read_config_file(path: str) -> dict:
    """``key = value`` lines (an optional ``[section]`` header is ignored)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text if text.lstrip().startswith("[") else "[hdcb]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    out = {}
    for sec in cp.sections():
        for k, v in cp.items(sec):
            out[k.replace("-", "_")] = v
    return out


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--kind", help="VSA kind, e.g. MAP-B, FHRR, BSDC-SEG")
    g.add_argument("--dim", help="number of dimensions D")
    g.add_argument("--density", help="on-bit probability of sparse kinds (default 1/sqrt(D))")
    g.add_argument("--seed", help="64-bit unsigned seed (default 0)")
    g.add_argument("--repeats", help="repetitions per cell")
    g.add_argument("--out", help="primary output path")
    g.add_argument("--threads", help="worker threads (default: logical cores)")
    g.add_argument("--fast", action="store_const", const=True, default=None,
                   help="reduced grid for quick checks")
    g.add_argument("--config", help="key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hdcb", description="Hyperdimensional computing benchmark harness")
    parser.add_argument("--version", action="version", version=f"hdcb {__version__}")
    parser.add_argument("--from-manifest", dest="from_manifest", metavar="MANIFEST",
                        help="replay the run recorded in a manifest file")
    parser.add_argument("--out", dest="replay_out", help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name, helptext in (("capacity", "bundling capacity grid"),
                           ("pairs", "bundled role-filler pairs grid")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--items", help="item memory size N (default 1000)")
        p.add_argument("--dims", help="dimensions, e.g. 'sq:2-34' for i^2, or '100,200'")
        p.add_argument("--ks", help="bundle sizes, e.g. '2-50'")
        p.add_argument("--threshold", help="accuracy threshold for min-D (default 0.99)")

    p = sub.add_parser("itemmem-sweep", help="minimum D versus item memory size")
    _common(p)
    p.add_argument("--k", help="bundled items (default 10)")
    p.add_argument("--ns", help="memory sizes, e.g. '10,100,1000'")
    p.add_argument("--dims", help="dimensions grid")
    p.add_argument("--threshold", help="accuracy threshold (default 0.99)")

    p = sub.add_parser("approx-unbind", help="approximate unbinding of chained bindings")
    _common(p)
    p.add_argument("--kinds", help="comma-separated kinds (default MAP-C,HRR,VTB)")
    p.add_argument("--n-max", dest="n_max", help="longest chain (default 40)")

    p = sub.add_parser("reason", help="analogical reasoning demos")
    rs = p.add_subparsers(dest="demo", parser_class=_Parser)
    q = rs.add_parser("dollar-of-mexico", help="what is the Dollar of Mexico?")
    _common(q)
    q.add_argument("--trials", help="seeded trials (default 100)")
    q.add_argument("--path", choices=("auto", "one-step", "two-step"), default=None)
    q.add_argument("--distractors", help="extra random items in memory (default 97)")
    q.add_argument("--no-clean", dest="no_clean", action="store_const", const=True, default=None,
                   help="skip the intermediate clean-up of the two-step path")

    p = sub.add_parser("langrec", help="n-gram language recognition")
    ls = p.add_subparsers(dest="action", parser_class=_Parser)
    q = ls.add_parser("make-corpus", help="write a synthetic multi-language corpus")
    _common(q)
    q.add_argument("--languages", help="number of languages (default 5)")
    q.add_argument("--train", help="training sentences per language (default 200)")
    q.add_argument("--test", help="test sentences per language (default 50)")
    q = ls.add_parser("train", help="train a model on <corpus>/<label>/train.txt")
    _common(q)
    q.add_argument("--corpus", help="corpus directory")
    q.add_argument("--n", help="n-gram order (default 3)")
    q = ls.add_parser("eval", help="evaluate a model on <corpus>/<label>/test.txt")
    _common(q)
    q.add_argument("--model", help="model file from 'langrec train'")
    q.add_argument("--corpus", help="corpus directory")

    p = sub.add_parser("placerec", help="sequence-based place recognition")
    _common(p)
    p.add_argument("--db", help="database descriptors (VSAD or CSV)")
    p.add_argument("--query", help="query descriptors (VSAD or CSV)")
    p.add_argument("--gt", help="ground-truth CSV (m x n, 0/1)")
    p.add_argument("--synthetic", action="store_const", const=True, default=None,
                   help="use the built-in synthetic sequence fixture")
    p.add_argument("--rows", help="images per synthetic set (default 200)")
    p.add_argument("--noise", help="noise level of synthetic queries (default 10.0)")
    p.add_argument("--fixture-cols", dest="fixture_cols", help="synthetic descriptor size")
    p.add_argument("--write-fixture", dest="write_fixture", metavar="DIR",
                   help="write the synthetic fixture as db.vsad/query.vsad/gt.csv and exit")
    p.add_argument("--seqlen", help="sequence half-length d (default 5)")
    p.add_argument("--mode", choices=("pairwise", "seqslam", "vsa", "all"), default=None)
    p.add_argument("--dump-similarity", dest="dump_similarity", metavar="PREFIX",
                   help="also write each similarity matrix as PREFIX_<kind>_<mode>.csv")

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    _common(p)
    return parser


def _command_name(ns: argparse.Namespace) -> str:
    if ns.command == "reason":
        if not ns.demo:
            raise UsageError("reason needs a demo name (dollar-of-mexico)")
        return f"reason {ns.demo}"
    if ns.command == "langrec":
        if not ns.action:
            raise UsageError("langrec needs an action (make-corpus, train, eval)")
        return f"langrec {ns.action}"
    return ns.command


def resolve(command: str, ns: argparse.Namespace, environ=None) -> dict:
    """Merge defaults, config file, environment and flags into one dict."""
    environ = os.environ if environ is None else environ
    values = dict(COMMON_DEFAULTS)
    values.update(COMMAND_DEFAULTS[command])
    values["out"] = DEFAULT_OUT[command]
    values["threads"] = os.cpu_count() or 1
    keys = set(values)
    cli = {k: v for k, v in vars(ns).items() if k in keys and v is not None}
    config_path = getattr(ns, "config", None) or environ.get(ENV_PREFIX + "CONFIG")
    layered = {}
    if config_path:
        for k, v in read_config_file(config_path).items():
            if k not in keys:
                raise ConfigError(f"unknown option {k!r} in config file {config_path}")
            layered[k] = v
    for k in keys:
        env = environ.get(ENV_PREFIX + k.upper())
        if env is not None:
            layered[k] = env
    layered.update(cli)
    fast = _to_bool(layered.get("fast", values["fast"]))
    if fast:
        for k, v in FAST_OVERRIDES.get(command, {}).items():
            if k not in cli and k not in layered:
                values[k] = v
    values.update(layered)
    return {k: _coerce(k, v) for k, v in values.items()}


# --------------------------------------------------------------------------
# commands


def _cfg(opts: dict, kind=None, dim=None) -> VsaConfig:
    kind = VsaKind.parse(kind or opts["kind"])
    d = dim if dim is not None else opts.get("dim")
    if d is None:
        raise ConfigError("--dim is required")
    return VsaConfig(kind, d, density=opts.get("density"), seed=opts["seed"])


def _paths(out: str) -> tuple[Path, Path, Path]:
    p = Path(out)
    stem = p.with_suffix("") if p.suffix else p
    return p, stem.with_name(stem.name + ".json"), stem.with_name(stem.name + ".manifest.json")


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    from .serialization import write_rows_csv

    path.parent.mkdir(parents=True, exist_ok=True)
    write_rows_csv(path, header, rows)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _grid_cmd(command: str, opts: dict) -> list[Path]:
    from .experiments import min_dims, run_bundled_pairs, run_capacity

    cfg = _cfg(opts, dim=4)
    runner = run_capacity if command == "capacity" else run_bundled_pairs
    grid = runner(cfg, n_items=opts["items"], dims=parse_int_list(opts["dims"]),
                  ks=parse_int_list(opts["ks"]), repeats=opts["repeats"], threads=opts["threads"])
    out, js, _ = _paths(opts["out"])
    _write_csv(out, ["kind", "D", "k", "repeat", "accuracy"],
               ((k, D, kk, r, _fmt(a)) for k, D, kk, r, a in grid.records()))
    summary = min_dims(grid, opts["threshold"]).to_dict()
    summary["mode"] = grid.mode
    summary["estimate_k15"] = min_dims(grid, opts["threshold"]).estimate(15) if 15 in grid.ks else None
    _write_json(js, summary)
    return [out, js]


def _itemmem_cmd(opts: dict) -> list[Path]:
    from .experiments import run_itemmem_sweep

    cfg = _cfg(opts, dim=4)
    sweep = run_itemmem_sweep(cfg, k=opts["k"], ns=parse_int_list(opts["ns"]),
                              dims=parse_int_list(opts["dims"]), repeats=opts["repeats"],
                              threshold=opts["threshold"], threads=opts["threads"])
    out, js, _ = _paths(opts["out"])
    _write_csv(out, ["kind", "N", "D", "k", "repeat", "accuracy"],
               ((a, n, D, k, r, _fmt(x)) for a, n, D, k, r, x in sweep.records()))
    _write_json(js, {"kind": cfg.kind.value, "k": sweep.k, "threshold": sweep.threshold,
                     "min_dims": {str(n): m for n, m in zip(sweep.ns, sweep.min_dims)}})
    return [out, js]


def _approx_cmd(opts: dict) -> list[Path]:
    from .experiments import run_approx_unbind

    kinds = [VsaKind.parse(k) for k in str(opts["kinds"]).split(",") if k.strip()]
    if opts.get("kind"):
        kinds = [VsaKind.parse(opts["kind"])]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        curves = run_approx_unbind(kinds, dim=opts["dim"], n_max=opts["n_max"],
                                   repeats=opts["repeats"], seed=opts["seed"], threads=opts["threads"])
    out, js, _ = _paths(opts["out"])
    rows = (r for c in curves.values() for r in c.records())
    _write_csv(out, ["kind", "D", "n", "repeat", "normalized_similarity"],
               ((k, D, n, r, _fmt(v)) for k, D, n, r, v in rows))
    _write_json(js, {k.value: [float(x) for x in c.mean] for k, c in curves.items()})
    return [out, js]


def _reason_cmd(opts: dict) -> list[Path]:
    from .reasoning import dollar_of_mexico

    cfg = _cfg(opts)
    res = [dollar_of_mexico(cfg, t, path=opts["path"], distractors=opts["distractors"],
                            clean=not opts["no_clean"]) for t in range(opts["trials"])]
    out, js, _ = _paths(opts["out"])
    _write_csv(out, ["kind", "D", "trial", "path", "expected", "answer", "score", "margin", "correct"],
               ((r["kind"], r["dim"], r["trial"], r["path"], r["expected"], r["answer"],
                 _fmt(r["score"]), _fmt(r["margin"]), int(r["correct"])) for r in res))
    acc = float(np.mean([r["correct"] for r in res])) if res else 0.0
    _write_json(js, {"kind": cfg.kind.value, "dim": cfg.dim, "trials": len(res), "accuracy": acc,
                     "path": res[0]["path"] if res else opts["path"]})
    print(f"{cfg.kind.value} D={cfg.dim} path={res[0]['path'] if res else '-'}: "
          f"{sum(r['correct'] for r in res)}/{len(res)} correct")
    return [out, js]


def _langrec_cmd(command: str, opts: dict) -> list[Path]:
    from . import langrec

    if command == "langrec make-corpus":
        corpus = langrec.synthetic_corpus(opts["languages"], opts["train"], opts["test"], opts["seed"])
        root = Path(opts["out"])
        langrec.write_corpus(corpus, root)
        return [root]
    if opts.get("corpus") is None:
        raise ConfigError("--corpus is required")
    corpus = langrec.load_corpus(opts["corpus"])
    if command == "langrec train":
        model = langrec.train(_cfg(opts), corpus, opts["n"])
        out = Path(opts["out"])
        out.parent.mkdir(parents=True, exist_ok=True)
        langrec.save_model(model, out)
        return [out]
    if opts.get("model") is None:
        raise ConfigError("--model is required")
    model = langrec.load_model(opts["model"])
    ev = langrec.evaluate(model, corpus)
    out, js, _ = _paths(opts["out"])
    _write_csv(out, ["kind", "D", "label", "predicted", "correct", "sentence"],
               ((model.cfg.kind.value, model.cfg.dim, t, p, int(t == p), s) for t, p, s in ev.predictions))
    _write_json(js, {"kind": model.cfg.kind.value, "dim": model.cfg.dim, "overall": ev.overall,
                     "per_language": ev.per_language, "n_test": ev.n_test})
    print(f"{model.cfg.kind.value} D={model.cfg.dim}: accuracy {ev.overall:.4f} on {ev.n_test} sentences")
    return [out, js]


def _placerec_cmd(opts: dict) -> list[Path]:
    from . import placerec as pr

    if opts["write_fixture"]:
        db, q, gt = pr.synthetic_fixture(opts["rows"], opts["fixture_cols"], opts["noise"], opts["seed"])
        root = Path(opts["write_fixture"])
        root.mkdir(parents=True, exist_ok=True)
        pr.save_descriptors(db, root / "db.vsad")
        pr.save_descriptors(q, root / "query.vsad")
        np.savetxt(root / "gt.csv", gt.astype(int), delimiter=",", fmt="%d")
        return [root / "db.vsad", root / "query.vsad", root / "gt.csv"]
    if opts["synthetic"]:
        db, q, gt = pr.synthetic_fixture(opts["rows"], opts["fixture_cols"], opts["noise"], opts["seed"])
    else:
        if not (opts["db"] and opts["query"] and opts["gt"]):
            raise ConfigError("placerec needs --db, --query and --gt (or --synthetic)")
        db = pr.load_descriptors(opts["db"])
        q = pr.load_descriptors(opts["query"])
        gt = pr.load_ground_truth(opts["gt"])
    modes = pr.MODES if opts["mode"] == "all" else (opts["mode"],)
    cfg = _cfg(opts)
    results = pr.run_place_recognition(cfg, db, q, gt, modes=modes, d=opts["seqlen"])
    out, js, _ = _paths(opts["out"])
    _write_csv(out, ["mode", "kind", "auc"], ((r.mode, r.kind.value, _fmt(r.auc)) for r in results))
    written = [out]
    if opts["dump_similarity"]:
        for r in results:
            p = Path(f"{opts['dump_similarity']}_{r.kind.value}_{r.mode}.csv")
            p.parent.mkdir(parents=True, exist_ok=True)
            np.savetxt(p, r.similarity, delimiter=",", fmt="%.17g")
            written.append(p)
    for r in results:
        print(f"{r.kind.value} {r.mode}: AUC {r.auc:.4f}")
    return written


def _selftest_cmd(opts: dict) -> list[Path]:
    from .selftest import run_selftest

    results = run_selftest(seed=opts["seed"])
    out, _, _ = _paths(opts["out"])
    _write_csv(out, ["check", "passed", "detail"], ((n, int(ok), d) for n, ok, d in results))
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    if not all(ok for _, ok, _ in results):
        raise _SelfTestFailed()
    return [out]


class _SelfTestFailed(Exception):
    pass


def run_command(command: str, opts: dict) -> list[Path]:
    if command in ("capacity", "pairs"):
        return _grid_cmd(command, opts)
    if command == "itemmem-sweep":
        return _itemmem_cmd(opts)
    if command == "approx-unbind":
        return _approx_cmd(opts)
    if command == "reason dollar-of-mexico":
        return _reason_cmd(opts)
    if command.startswith("langrec"):
        return _langrec_cmd(command, opts)
    if command == "placerec":
        return _placerec_cmd(opts)
    if command == "selftest":
        return _selftest_cmd(opts)
    raise UsageError(f"unknown command {command!r}")


def _execute(command: str, opts: dict) -> None:
    start = time.perf_counter()
    outputs = run_command(command, opts)
    manifest = {
        "tool": "hdcb",
        "version": __version__,
        "subcommand": command,
        "config": opts,
        "seed": opts["seed"],
        "wall_clock_seconds": round(time.perf_counter() - start, 3),
        "outputs": [str(p) for p in outputs],
    }
    _write_json(_paths(opts["out"])[2], manifest)


def _replay(path: str, out: str | None) -> tuple[str, dict]:
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
        command = manifest["subcommand"]
        opts = dict(manifest["config"])
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    if command not in COMMAND_DEFAULTS:
        raise DataError(f"manifest names unknown subcommand {command!r}")
    if out:
        opts["out"] = out
    return command, opts


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.from_manifest:
            command, opts = _replay(ns.from_manifest, ns.replay_out)
        else:
            if not ns.command:
                parser.print_help(sys.stderr)
                return EXIT_CONFIG
            command = _command_name(ns)
            opts = resolve(command, ns)
        _execute(command, opts)
    except _SelfTestFailed:
        return EXIT_FAILED
    except (ConfigError, UnsupportedOperationError) as exc:
        print(f"hdcb: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"hdcb: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HDCError as exc:
        print(f"hdcb: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"hdcb: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
