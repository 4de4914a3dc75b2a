"""Command-line interface.

Every command writes its outputs and a ``manifest.json`` into ``--out``.
``replay`` re-runs a manifest; the recorded output digests let the result be
compared byte for byte. Any flag can also be set through an environment
variable ``MENTORCHESS_<FLAG>`` (dashes become underscores), e.g.
``MENTORCHESS_SEED=7``; explicit flags win.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import gzip
import hashlib
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .arena import load_openings, load_suite, play_match, run_epd_suite
from .arena.match import generate_corpus
from .arena.search import negamax_value
from .chesscore import START_FEN, parse_fen, parse_pgn_games
from .evalfn import TUNED_PARAMS, EvalParams, evaluate, parse_params, write_params
from .ga import GAConfig
from .genome import Chromosome, decode, write_chromosome
from .mentor import MentorConfig, ScoreCache
from .training import PROFILES, ReportWriter, build_dataset, read_dataset, run_evolution, write_dataset

log = logging.getLogger("mentorchess")

ENV_PREFIX = "MENTORCHESS_"
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
BUILTIN_PARAMS = {"tuned": TUNED_PARAMS, "zero": EvalParams.zeros(),
                  "material": EvalParams.material_only()}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers ---------------------------------------------------------------

def load_params(spec: str) -> EvalParams:
    """A builtin name (tuned, zero, material), a NAME = value file, or a 230-bit chromosome file."""
    if spec in BUILTIN_PARAMS:
        return BUILTIN_PARAMS[spec]
    text = Path(spec).read_text()
    stripped = text.strip()
    if stripped and set(stripped) <= {"0", "1"}:
        return decode(Chromosome.from_text(stripped))
    try:
        return parse_params(text)
    except ValueError as exc:
        raise ValueError(f"{spec}: {exc}") from None


def _read_text(path: str | Path) -> str:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            return fh.read()
    return path.read_text()


def _bundled_corpus() -> str:
    data = resources.files("mentorchess.data").joinpath("selfplay.pgn.gz").read_bytes()
    return gzip.decompress(data).decode()


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _digest_inputs(paths) -> dict[str, str]:
    return {str(p): _sha256(Path(p)) for p in paths if p and Path(p).is_file()}


def _mentor_config(args, depth: int) -> MentorConfig:
    if args.mentor == "uci":
        if not args.engine_cmd:
            raise UsageError("--mentor uci requires --engine-cmd")
        return MentorConfig("uci", depth, engine_command=args.engine_cmd,
                            processes=max(1, args.threads))
    hidden = load_params(args.hidden_params)
    return MentorConfig("synthetic", depth, hidden_params=hidden, noise_cp=args.noise,
                        seed=args.seed)


def _write_manifest(args, out: Path, outputs: list[str], extra: dict | None = None) -> None:
    recorded = {k: v for k, v in vars(args).items() if k not in ("func", "out", "log_level")}
    manifest = {
        "tool": "mentorchess",
        "version": __version__,
        "command": args.command,
        "args": recorded,
        "outputs": {name: _sha256(out / name) for name in sorted(outputs)},
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out or Path("mentorchess-out") / args.command)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands --------------------------------------------------------------

def cmd_ingest(args) -> int:
    profile = PROFILES[args.profile]
    count = args.count or profile.train_size + profile.test_size
    if count < 2:
        raise UsageError("--count must be at least 2")
    n_train = int(round(count * args.split))
    if args.pgn:
        games = []
        for path in args.pgn:
            games.extend(parse_pgn_games(_read_text(path)))
    else:
        games = parse_pgn_games(_bundled_corpus())
    depth = 2 if args.depth is None else args.depth
    mentor = _mentor_config(args, depth)
    out = _out_dir(args)
    cache = ScoreCache(args.cache) if args.cache else None
    ds = build_dataset(games, n_train, count - n_train, mentor, args.seed, cache)
    if cache is not None:
        cache.save()
    write_dataset(out, ds)
    digest = read_dataset(out).source_digest
    _write_manifest(args, out, ["train.tsv", "test.tsv"],
                    {"inputs": _digest_inputs(args.pgn or []), "dataset_digest": digest,
                     "mentor": mentor.describe()})
    print(f"{len(ds.train)} train + {len(ds.test)} test positions -> {out}")
    return EXIT_OK


def _ga_config(args) -> GAConfig:
    profile = PROFILES[args.profile]
    return GAConfig(
        population_size=args.population or profile.population_size,
        generations=profile.generations if args.generations is None else args.generations,
        positions_per_generation=args.positions or profile.positions_per_generation,
        crossover_rate=args.crossover_rate,
        mutation_rate=args.mutation_rate,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    ds = read_dataset(args.dataset)
    cfg = _ga_config(args)
    out = _out_dir(args)
    with ReportWriter(out) as writer:
        def report(r):
            writer(r)
            log.info("generation %d best %.2f mean %.2f", r.generation, r.best_error_cp, r.mean_error_cp)
        result = run_evolution(ds, cfg, resample=not args.no_resample,
                               individual_depth=args.depth or 0, on_generation=report)
    write_chromosome(out / "best.chrom", result.best.chromosome)
    write_params(out / "best_params.txt", result.best_params)
    (out / "summary.csv").write_text(
        "train_error_cp,test_error_cp\n"
        f"{result.best.error_cp:.6f},{'' if result.test_error is None else f'{result.test_error:.6f}'}\n")
    _write_manifest(args, out, ["generations.csv", "best_chromosomes.txt", "best.chrom",
                                "best_params.txt", "summary.csv"],
                    {"dataset_digest": ds.source_digest, "ga": dataclasses.asdict(cfg)})
    print(f"best train error {result.best.error_cp:.2f} cp, test error "
          f"{'n/a' if result.test_error is None else f'{result.test_error:.2f} cp'} -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    params = load_params(args.params)
    out = _out_dir(args)
    lines = []
    if args.dataset:
        ds = read_dataset(args.dataset)
        split = ds.test or ds.train
        err = np.mean([abs(s.score_cp - evaluate(p, params)) for p, s in split])
        lines.append(f"{err:.6f}")
        print(f"mean absolute error {err:.2f} cp over {len(split)} positions")
    else:
        p = parse_fen(args.fen or START_FEN)
        depth = args.depth or 0
        score = evaluate(p, params) if depth == 0 else p.side_to_move * negamax_value(p, params, depth)
        lines.append(str(score))
        print(score)
    (out / "eval.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(args, out, ["eval.txt"], {"inputs": _digest_inputs([args.params, args.dataset])})
    return EXIT_OK


def cmd_match(args) -> int:
    a, b = load_params(args.a), load_params(args.b)
    openings = load_openings(args.openings)
    depth = 3 if args.depth is None else args.depth
    out = _out_dir(args)

    def progress(g, rec):
        log.info("game %d: %s (%s)", g + 1, rec.result, rec.termination)

    res = play_match(a, b, args.games, depth, openings, args.max_plies, quiesce=args.quiesce,
                     progress=progress)
    (out / "summary.csv").write_text(res.summary_csv())
    (out / "games.pgn").write_text(res.to_pgn())
    _write_manifest(args, out, ["summary.csv", "games.pgn"],
                    {"inputs": _digest_inputs([args.a, args.b, args.openings])})
    print(res.summary_csv(), end="")
    return EXIT_OK


def cmd_suite(args) -> int:
    params = load_params(args.params)
    records = load_suite(args.epd)
    depth = 4 if args.depth is None else args.depth
    out = _out_dir(args)
    res = run_epd_suite(records, params, depth, quiesce=args.quiesce)
    (out / "suite.csv").write_text(res.to_csv())
    _write_manifest(args, out, ["suite.csv"], {"inputs": _digest_inputs([args.params, args.epd])})
    print(f"{res.solved}/{len(records)}")
    return EXIT_OK


def cmd_selfplay(args) -> int:
    out = _out_dir(args)
    depth = 2 if args.depth is None else args.depth
    base = load_params(args.params)
    text = generate_corpus(args.games, args.seed, depth=depth, base=base)
    with gzip.GzipFile(out / "selfplay.pgn.gz", "wb", mtime=0) as fh:
        fh.write(text.encode())
    _write_manifest(args, out, ["selfplay.pgn.gz"])
    print(f"{args.games} games -> {out / 'selfplay.pgn.gz'}")
    return EXIT_OK


def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    if manifest.get("tool") != "mentorchess":
        raise ValueError(f"{args.manifest}: not a mentorchess manifest")
    recorded = dict(manifest["args"])
    ns = argparse.Namespace(**recorded)
    ns.out = args.out or str(Path(args.manifest).parent / "replay")
    ns.log_level = args.log_level
    ns.func = COMMANDS[recorded["command"]]
    status = ns.func(ns)
    if status != EXIT_OK:
        return status
    replayed = json.loads((Path(ns.out) / "manifest.json").read_text())
    diffs = [k for k, v in manifest["outputs"].items() if replayed["outputs"].get(k) != v]
    if diffs:
        print(f"replay differs in: {', '.join(diffs)}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"replay identical ({len(manifest['outputs'])} outputs)")
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "train": cmd_train, "eval": cmd_eval, "match": cmd_match,
            "suite": cmd_suite, "selfplay": cmd_selfplay, "replay": cmd_replay}


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    common.add_argument("--mentor", choices=["synthetic", "uci"], default="synthetic")
    common.add_argument("--engine-cmd", help="UCI engine command line for --mentor uci")
    common.add_argument("--depth", type=int, help="search depth in plies (meaning depends on command)")
    common.add_argument("--threads", type=int, default=1, help="worker cap (mentor engine processes)")
    common.add_argument("--out", help="output directory (default mentorchess-out/<command>)")
    common.add_argument("--log-level", default="WARNING")

    ap = _Parser(prog="mentorchess", description=__doc__,
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"mentorchess {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="sample positions and score them with a mentor")
    p.add_argument("pgn", nargs="*", help="PGN files (.pgn or .pgn.gz); default bundled corpus")
    p.add_argument("--count", type=int, help="positions to sample (default from profile)")
    p.add_argument("--split", type=float, default=0.5, help="train fraction")
    p.add_argument("--hidden-params", default="tuned", help="synthetic mentor parameters")
    p.add_argument("--noise", type=int, default=0, help="synthetic mentor noise in cp")
    p.add_argument("--cache", help="mentor score cache file")

    p = sub.add_parser("train", parents=[common], help="evolve evaluation parameters")
    p.add_argument("--dataset", required=True, help="directory holding train.tsv and test.tsv")
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--positions", type=int, help="positions per generation")
    p.add_argument("--crossover-rate", type=float, default=0.75)
    p.add_argument("--mutation-rate", type=float, default=0.002)
    p.add_argument("--no-resample", action="store_true", help="one fixed position sample for all generations")

    p = sub.add_parser("eval", parents=[common], help="score a position or a dataset")
    p.add_argument("--fen")
    p.add_argument("--params", default="tuned")
    p.add_argument("--dataset", help="report mean absolute error on this dataset's test split")

    p = sub.add_parser("match", parents=[common], help="play a match between two parameter sets")
    p.add_argument("--a", required=True, help="parameters of player A")
    p.add_argument("--b", required=True, help="parameters of player B")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--openings", help="SAN opening lines file (default bundled set)")
    p.add_argument("--max-plies", type=int, default=300)
    p.add_argument("--quiesce", action="store_true")

    p = sub.add_parser("suite", parents=[common], help="score an EPD suite")
    p.add_argument("--params", default="tuned")
    p.add_argument("--epd", help="EPD file (default bundled mini-suite)")
    p.add_argument("--quiesce", action="store_true")

    p = sub.add_parser("selfplay", parents=[common], help="generate a self-play PGN corpus")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--params", default="tuned")

    p = sub.add_parser("replay", parents=[common], help="re-run a manifest and compare outputs")
    p.add_argument("manifest")
    return ap


def _apply_env(parser: argparse.ArgumentParser, env) -> None:
    """Environment values become defaults, so explicit flags still take precedence."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                _apply_env(sp, env)
            continue
        if not action.option_strings or action.dest in ("help", "version"):
            continue
        key = ENV_PREFIX + action.dest.upper()
        if key not in env:
            continue
        raw = env[key]
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError:
                raise UsageError(f"{key}: invalid value {raw!r}") from None
            if action.choices and value not in action.choices:
                raise UsageError(f"{key}: {raw!r} not in {sorted(action.choices)}")
        action.default = value
        action.required = False


def main(argv: list[str] | None = None, env=None) -> int:
    try:
        parser = build_parser()
        _apply_env(parser, os.environ if env is None else env)
        args = parser.parse_args(argv)
        args.func = COMMANDS[args.command]
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        log.debug("traceback", exc_info=True)
        return EXIT_RUNTIME


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
