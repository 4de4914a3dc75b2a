"""Engine-vs-engine games and matches between parameter sets."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..chesscore import Move, Position, game_to_pgn, parse_san
from ..chesscore import kernel as K
from ..evalfn import EvalParams
from .elo import UndefinedRatingError, elo_diff
from .search import search_root

MOVE_CAP = 300
# a move back into an earlier game position is worth a draw, minus this much
CONTEMPT_CP = 1


@dataclass
class GameRecord:
    start: Position
    moves: list[Move]
    result: str           # "1-0", "0-1" or "1/2-1/2"
    termination: str      # checkmate, stalemate, fifty-move, repetition, move-cap, resignation
    white: str = "A"
    black: str = "B"

    def points(self, player: str) -> float:
        if self.result == "1/2-1/2":
            return 0.5
        winner = self.white if self.result == "1-0" else self.black
        return 1.0 if winner == player else 0.0

    def to_pgn(self, round_no: int | None = None) -> str:
        headers = {"Event": "mentorchess match", "Round": str(round_no or "?"),
                   "White": self.white, "Black": self.black, "Result": self.result,
                   "Termination": self.termination}
        if self.start != Position.start():
            headers["SetUp"] = "1"
            headers["FEN"] = self.start.fen()
        return game_to_pgn(headers, self.moves, self.start)


@dataclass
class MatchResult:
    games: int
    score_a: float
    score_b: float
    records: list[GameRecord] = field(repr=False, default_factory=list)

    @property
    def win_pct(self) -> float:
        return self.score_a / self.games if self.games else 0.0

    @property
    def elo_diff(self) -> float:
        try:
            return elo_diff(self.win_pct)
        except UndefinedRatingError:
            return math.inf if self.win_pct >= 1 else -math.inf

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["games", "score_a", "win_pct", "elo_diff"])
        w.writerow([self.games, f"{self.score_a:g}", f"{self.win_pct:.4f}", f"{self.elo_diff + 0.0:.1f}"])
        return buf.getvalue()

    def to_pgn(self) -> str:
        return "\n".join(r.to_pgn(i + 1) for i, r in enumerate(self.records))


def _key(board, st) -> bytes:
    return board.tobytes() + st[:3].tobytes()


def choose_move(board, st, depth: int, weights, quiesce: bool, seen) -> tuple[int, int]:
    """Search a move, valuing moves that return to a position in `seen` as a draw.

    Returns (move, score of the unrestricted search). Without this, fixed
    tie-breaking lets both sides shuffle into threefold repetition whenever the
    evaluation is flat.
    """
    m, score, _ = search_root(board, st, depth, weights, quiesce)
    first_score, repeat_move, excluded = score, -1, []
    while m >= 0:
        undo = K.make_move(board, st, m)
        repeats = _key(board, st) in seen
        K.unmake_move(board, st, m, undo)
        if not repeats:
            break
        if repeat_move < 0:
            repeat_move = m
        excluded.append(m)
        m, score, _ = search_root(board, st, depth, weights, quiesce, np.array(excluded, np.int64))
    if m >= 0 and (repeat_move < 0 or score >= -CONTEMPT_CP):
        return m, first_score
    return repeat_move, first_score


def play_game(white: EvalParams, black: EvalParams, depth: int, start: Position,
              max_plies: int = MOVE_CAP, quiesce: bool = False,
              rng: np.random.Generator | None = None, random_move_prob: float = 0.0,
              random_plies: int = MOVE_CAP, resign_cp: int | None = None) -> GameRecord:
    """Play one game.

    With `rng`, during the first `random_plies` plies a random legal move replaces
    the search with probability `random_move_prob`. With `resign_cp`, a side whose
    search score is at most -resign_cp on two consecutive turns resigns.
    """
    board, st = start.arrays()
    weights = {1: white.weights(), -1: black.weights()}
    seen: dict[bytes, int] = {}
    moves: list[Move] = []
    buf = np.empty(K.MAX_MOVES, np.int32)
    losing = {1: 0, -1: 0}
    while True:
        key = _key(board, st)
        seen[key] = seen.get(key, 0) + 1
        side = int(st[K.SIDE])
        n = K.gen_legal(board, st, buf)
        if n == 0:
            if K.in_check(board, side):
                return GameRecord(start, moves, "0-1" if side == 1 else "1-0", "checkmate")
            return GameRecord(start, moves, "1/2-1/2", "stalemate")
        if seen[key] >= 3:
            return GameRecord(start, moves, "1/2-1/2", "repetition")
        if st[K.HALFMOVE] >= 100:
            return GameRecord(start, moves, "1/2-1/2", "fifty-move")
        if len(moves) >= max_plies:
            return GameRecord(start, moves, "1/2-1/2", "move-cap")
        if (rng is not None and len(moves) < random_plies and random_move_prob > 0
                and rng.random() < random_move_prob):
            m = int(buf[int(rng.integers(n))])
        else:
            m, score = choose_move(board, st, depth, weights[side], quiesce, seen)
            if resign_cp is not None:
                losing[side] = losing[side] + 1 if score <= -resign_cp else 0
                if losing[side] >= 2:
                    return GameRecord(start, moves, "0-1" if side == 1 else "1-0", "resignation")
        moves.append(Move.decode(m))
        K.make_move(board, st, m)


def play_match(params_a: EvalParams, params_b: EvalParams, games: int, depth: int,
               openings: list[Position], max_plies: int = MOVE_CAP, quiesce: bool = False,
               progress=None) -> MatchResult:
    """Pairs of games from the same opening with colors swapped; A is White first."""
    if games <= 0 or games % 2:
        raise ValueError("games must be a positive even number")
    if not openings:
        raise ValueError("at least one opening is required")
    records = []
    score_a = 0.0
    for g in range(games):
        start = openings[(g // 2) % len(openings)]
        if g % 2 == 0:
            rec = play_game(params_a, params_b, depth, start, max_plies, quiesce)
            rec.white, rec.black = "A", "B"
        else:
            rec = play_game(params_b, params_a, depth, start, max_plies, quiesce)
            rec.white, rec.black = "B", "A"
        score_a += rec.points("A")
        records.append(rec)
        if progress:
            progress(g, rec)
    return MatchResult(games, score_a, games - score_a, records)


def load_opening_lines(path: str | Path | None = None) -> list[list[Move]]:
    """Opening move sequences, one SAN line each (bundled set when `path` is None)."""
    if path is None:
        text = resources.files("mentorchess.data").joinpath("openings.txt").read_text()
    else:
        text = Path(path).read_text()
    lines = []
    for raw in text.splitlines():
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        p, line = Position.start(), []
        for tok in raw.split():
            if tok[0].isdigit():
                continue
            m = parse_san(p, tok)
            line.append(m)
            p = p.push(m)
        lines.append(line)
    return lines


def load_openings(path: str | Path | None = None) -> list[Position]:
    positions = []
    for line in load_opening_lines(path):
        p = Position.start()
        for m in line:
            p = p.push(m)
        positions.append(p)
    return positions


def generate_corpus(games: int, seed: int, depth: int = 2, max_plies: int = 160,
                    random_move_prob: float = 0.3, random_plies: int = 12, quiesce: bool = True,
                    resign_cp: int = 400, spread: float = 0.2, base: EvalParams | None = None) -> str:
    """Self-play PGN corpus from perturbed copies of `base` with random-move noise."""
    from ..evalfn import MAX_VALUES, TUNED_PARAMS

    base = base or TUNED_PARAMS
    lines = load_opening_lines()
    rng = np.random.default_rng(seed)
    chunks = []
    for g in range(games):
        sides = []
        for _ in range(2):
            scale = rng.uniform(1 - spread, 1 + spread, len(base))
            vals = np.clip(np.rint(np.array(base.values) * scale), 0, MAX_VALUES)
            sides.append(EvalParams(vals))
        line = lines[int(rng.integers(len(lines)))]
        start = Position.start()
        for m in line:
            start = start.push(m)
        rec = play_game(sides[0], sides[1], depth, start, max_plies - len(line), quiesce, rng=rng,
                        random_move_prob=random_move_prob, random_plies=random_plies,
                        resign_cp=resign_cp)
        result = "*" if rec.termination == "move-cap" else rec.result
        headers = {"Event": "selfplay corpus", "Round": str(g + 1), "White": "selfplay",
                   "Black": "selfplay", "Result": result}
        chunks.append(game_to_pgn(headers, line + rec.moves))
    return "\n".join(chunks)
