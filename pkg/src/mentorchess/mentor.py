"""Mentor oracles: sources of the reference score for each training position.

Two backends share one contract. The synthetic backend scores positions with a
hidden parameter set (optionally searched and noised). The external backend
drives a UCI engine over standard I/O.
"""

from __future__ import annotations

import logging
import queue
import shlex
import subprocess
import threading
import zlib
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arena.search import MATE, negamax_value
from .chesscore import Position, parse_fen, position_id
from .evalfn import EvalParams, evaluate

log = logging.getLogger(__name__)

SCORE_CLAMP = 3000


class MentorError(RuntimeError):
    """Mentor failure; ``transcript`` holds the tail of the engine dialogue."""

    def __init__(self, message: str, transcript: list[str] | None = None):
        self.transcript = list(transcript or [])
        if self.transcript:
            message += "\n--- engine transcript tail ---\n" + "\n".join(self.transcript)
        super().__init__(message)


class EngineTimeout(MentorError):
    pass


class UciProtocolError(MentorError):
    pass


@dataclass(frozen=True)
class MentorScore:
    position_id: str
    score_cp: int

    def __post_init__(self):
        if abs(self.score_cp) > SCORE_CLAMP:
            raise ValueError(f"mentor score {self.score_cp} outside ±{SCORE_CLAMP}")


@dataclass(frozen=True)
class MentorConfig:
    backend: str = "synthetic"  # "synthetic" or "uci"
    search_depth: int = 2
    engine_command: str | None = None
    hidden_params: EvalParams | None = None
    noise_cp: int = 0
    seed: int = 0
    processes: int = 1
    timeout: float = 30.0

    def __post_init__(self):
        if self.backend not in ("synthetic", "uci"):
            raise ValueError(f"unknown mentor backend {self.backend!r}")
        if self.backend == "uci" and not self.engine_command:
            raise ValueError("uci mentor requires engine_command")
        if self.backend == "synthetic" and self.hidden_params is None:
            raise ValueError("synthetic mentor requires hidden_params")
        if self.noise_cp < 0 or self.search_depth < 0 or self.processes < 1:
            raise ValueError("noise_cp, search_depth must be >= 0 and processes >= 1")

    def describe(self) -> dict:
        d = {"backend": self.backend, "search_depth": self.search_depth}
        if self.backend == "uci":
            d["engine_command"] = self.engine_command
        else:
            d["hidden_params"] = self.hidden_params.as_dict()
            d["noise_cp"] = self.noise_cp
            d["seed"] = self.seed
        return d


def clamp(score: int) -> int:
    return max(-SCORE_CLAMP, min(SCORE_CLAMP, int(score)))


class ScoreCache:
    """Mentor scores keyed by (position id, depth), optionally backed by a file.

    File format: one ``<FEN>\\t<depth>\\t<score_cp>`` record per line.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._scores: dict[tuple[str, int], int] = {}
        if self.path and self.path.exists():
            for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    fen, depth, score = line.split("\t")
                    self._scores[(fen, int(depth))] = int(score)
                except ValueError:
                    raise ValueError(f"{self.path}:{lineno}: bad cache record {line!r}") from None

    def get(self, fen: str, depth: int) -> int | None:
        return self._scores.get((fen, depth))

    def put(self, fen: str, depth: int, score: int) -> None:
        self._scores[(fen, depth)] = score

    def __len__(self) -> int:
        return len(self._scores)

    def save(self) -> None:
        if self.path is None:
            return
        lines = [f"{fen}\t{depth}\t{score}\n" for (fen, depth), score in sorted(self._scores.items())]
        self.path.write_text("".join(lines))


def synthetic_score(p: Position, cfg: MentorConfig) -> int:
    """Hidden-parameter score from White's point of view."""
    if cfg.search_depth <= 1:
        score = evaluate(p, cfg.hidden_params)
    else:
        score = p.side_to_move * negamax_value(p, cfg.hidden_params, cfg.search_depth)
        if abs(score) > MATE // 2:
            score = SCORE_CLAMP if score > 0 else -SCORE_CLAMP
    if cfg.noise_cp:
        # noise derived from (seed, position) so results do not depend on query order
        seq = np.random.SeedSequence([cfg.seed, zlib.crc32(position_id(p).encode())])
        score += int(np.random.default_rng(seq).integers(-cfg.noise_cp, cfg.noise_cp + 1))
    return clamp(score)


class UciEngine:
    """A UCI engine child process queried one position at a time."""

    def __init__(self, command: str | list[str], timeout: float = 30.0, transcript_lines: int = 40):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.transcript: deque[str] = deque(maxlen=transcript_lines)
        self._lines: queue.Queue[str | None] = queue.Queue()
        try:
            self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                         stderr=subprocess.STDOUT, text=True, bufsize=1)
        except OSError as exc:
            raise MentorError(f"cannot start engine {argv!r}: {exc}") from None
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._handshake()

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)

    def send(self, line: str) -> None:
        self.transcript.append(f">> {line}")
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise MentorError("engine closed its input", list(self.transcript)) from None

    def _read(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise EngineTimeout(f"no engine output within {self.timeout}s", list(self.transcript)) from None
        if line is None:
            raise MentorError(f"engine exited (code {self.proc.poll()})", list(self.transcript))
        self.transcript.append(f"<< {line}")
        return line

    def _expect(self, token: str) -> None:
        while self._read().strip() != token:
            pass

    def _handshake(self):
        self.send("uci")
        self._expect("uciok")
        self.send("isready")
        self._expect("readyok")

    def new_game(self):
        self.send("ucinewgame")
        self.send("isready")
        self._expect("readyok")

    def score(self, fen: str, depth: int) -> int:
        """Score of `fen` at `depth` plies, White's point of view, clamped."""
        white_to_move = fen.split()[1] == "w"
        self.send(f"position fen {fen}")
        self.send(f"go depth {depth}")
        last = None
        while True:
            line = self._read()
            words = line.split()
            if not words:
                continue
            if words[0] == "bestmove":
                break
            if words[0] == "info" and "score" in words:
                last = line
        if last is None:
            raise UciProtocolError("no score reported before bestmove", list(self.transcript))
        score = parse_score(last)
        return clamp(score if white_to_move else -score)

    def close(self):
        if self.proc.poll() is None:
            try:
                self.send("quit")
            except MentorError:
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def parse_score(line: str) -> int:
    """Side-to-move score from a UCI ``info`` line; mates map to ±clamp."""
    words = line.split()
    try:
        i = words.index("score")
        kind, value = words[i + 1], int(words[i + 2])
    except (ValueError, IndexError):
        raise UciProtocolError(f"unparseable score line: {line!r}") from None
    if kind == "cp":
        return value
    if kind == "mate":
        return SCORE_CLAMP if value > 0 else -SCORE_CLAMP
    raise UciProtocolError(f"unparseable score line: {line!r}")


def uci_handshake_and_score(engine: UciEngine | str, fen: str, depth: int, timeout: float = 30.0) -> int:
    if isinstance(engine, UciEngine):
        return engine.score(fen, depth)
    with UciEngine(engine, timeout=timeout) as eng:
        return eng.score(fen, depth)


def score_positions(positions: list[Position], cfg: MentorConfig,
                    cache: ScoreCache | None = None) -> list[MentorScore]:
    """Mentor score for every position, in order. Cached scores skip the engine."""
    cache = cache if cache is not None else ScoreCache()
    ids = [position_id(p) for p in positions]
    pending = sorted({pid for pid in ids if cache.get(pid, cfg.search_depth) is None})
    if pending:
        log.info("mentor scoring %d positions (%s, depth %d)", len(pending), cfg.backend, cfg.search_depth)
        by_id = {pid: p for pid, p in zip(ids, positions)}
        if cfg.backend == "synthetic":
            for pid in pending:
                cache.put(pid, cfg.search_depth, synthetic_score(by_id[pid], cfg))
        else:
            for pid, score in _score_with_engines(pending, cfg):
                cache.put(pid, cfg.search_depth, score)
    return [MentorScore(pid, cache.get(pid, cfg.search_depth)) for pid in ids]


def _score_with_engines(fens: list[str], cfg: MentorConfig) -> list[tuple[str, int]]:
    shards = [fens[i::cfg.processes] for i in range(cfg.processes)]

    def run(shard):
        out = []
        if not shard:
            return out
        with UciEngine(cfg.engine_command, timeout=cfg.timeout) as eng:
            for fen in shard:
                full = fen if len(fen.split()) > 4 else fen + " 0 1"
                out.append((fen, eng.score(full, cfg.search_depth)))
        return out

    if cfg.processes == 1:
        return run(shards[0])
    with ThreadPoolExecutor(cfg.processes) as pool:
        results = list(pool.map(run, shards))
    return [item for shard in results for item in shard]


def position_from_id(pid: str) -> Position:
    return parse_fen(pid)
