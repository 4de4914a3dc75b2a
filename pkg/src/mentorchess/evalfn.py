"""Parameterized static evaluation.

The evaluation is linear: a 35-entry feature vector (White count minus Black
count) dotted with signed parameter weights. Features are defined in
``_side_features``; the parameter order is fixed by ``PARAM_NAMES``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np
from numba import njit

from .chesscore import Position
from .chesscore.kernel import BISHOP, KING, KING_TARGETS, KNIGHT, KNIGHT_TARGETS, PAWN, QUEEN, RAYS, ROOK

PARAM_NAMES = (
    "PAWN_VALUE", "KNIGHT_VALUE", "BISHOP_VALUE", "ROOK_VALUE", "QUEEN_VALUE",
    "PAWN_ADVANCE_A", "PAWN_ADVANCE_B", "PASSED_PAWN_MULT", "DOUBLED_PAWN_PENALTY",
    "ISOLATED_PAWN_PENALTY", "BACKWARD_PAWN_PENALTY", "WEAK_SQUARE_PENALTY",
    "PASSED_PAWN_ENEMY_KING_DIST", "KNIGHT_SQ_MULT", "KNIGHT_OUTPOST_MULT", "BISHOP_MOBILITY",
    "BISHOP_PAIR", "ROOK_ATTACK_KING_FILE", "ROOK_ATTACK_KING_ADJ_FILE",
    "ROOK_ATTACK_KING_ADJ_FILE_ABGH", "ROOK_7TH_RANK", "ROOK_CONNECTED", "ROOK_MOBILITY",
    "ROOK_BEHIND_PASSED_PAWN", "ROOK_OPEN_FILE", "ROOK_SEMI_OPEN_FILE",
    "ROOK_ATCK_WEAK_PAWN_OPEN_COLUMN", "ROOK_COLUMN_MULT", "QUEEN_MOBILITY",
    "KING_NO_FRIENDLY_PAWN", "KING_NO_FRIENDLY_PAWN_ADJ", "KING_FRIENDLY_PAWN_ADVANCED1",
    "KING_NO_ENEMY_PAWN", "KING_NO_ENEMY_PAWN_ADJ", "KING_PRESSURE_MULT",
)
NUM_PARAMS = len(PARAM_NAMES)
NUM_MATERIAL = 5
INDEX = {name: i for i, name in enumerate(PARAM_NAMES)}

# King-safety terms penalize the side owning the king even though their names
# carry no PENALTY suffix.
PENALTIES = frozenset(
    [n for n in PARAM_NAMES if "PENALTY" in n]
    + ["KING_NO_FRIENDLY_PAWN", "KING_NO_FRIENDLY_PAWN_ADJ", "KING_FRIENDLY_PAWN_ADVANCED1",
       "KING_NO_ENEMY_PAWN", "KING_NO_ENEMY_PAWN_ADJ", "KING_PRESSURE_MULT"]
)
SIGNS = np.array([-1 if n in PENALTIES else 1 for n in PARAM_NAMES], dtype=np.int64)
MAX_VALUES = np.array([1023] * NUM_MATERIAL + [63] * (NUM_PARAMS - NUM_MATERIAL), dtype=np.int64)


class EvalParams:
    """The 35 evaluation parameters, immutable, indexable by name."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[int]):
        vals = tuple(int(v) for v in values)
        if len(vals) != NUM_PARAMS:
            raise ValueError(f"expected {NUM_PARAMS} parameters, got {len(vals)}")
        for name, v, hi in zip(PARAM_NAMES, vals, MAX_VALUES):
            if not 0 <= v <= hi:
                raise ValueError(f"{name}={v} outside 0..{hi}")
        object.__setattr__(self, "_values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("EvalParams is immutable")

    @classmethod
    def zeros(cls) -> EvalParams:
        return cls([0] * NUM_PARAMS)

    @classmethod
    def from_mapping(cls, values: Mapping[str, int], default: int | None = None) -> EvalParams:
        unknown = set(values) - set(PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")
        if default is None:
            missing = [n for n in PARAM_NAMES if n not in values]
            if missing:
                raise ValueError(f"missing parameters: {missing}")
        return cls(values.get(n, default) for n in PARAM_NAMES)

    @classmethod
    def material_only(cls, pawn=100, knight=300, bishop=300, rook=500, queen=900) -> EvalParams:
        return cls([pawn, knight, bishop, rook, queen] + [0] * (NUM_PARAMS - NUM_MATERIAL))

    @property
    def values(self) -> tuple[int, ...]:
        return self._values

    def __getitem__(self, name: str) -> int:
        return self._values[INDEX[name]]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return NUM_PARAMS

    def __eq__(self, other) -> bool:
        return isinstance(other, EvalParams) and self._values == other._values

    def __hash__(self) -> int:
        return hash(self._values)

    def __repr__(self) -> str:
        return f"EvalParams({dict(self.as_dict())})"

    def as_dict(self) -> dict[str, int]:
        return dict(zip(PARAM_NAMES, self._values))

    def weights(self) -> np.ndarray:
        """Signed weight vector: dot with a feature vector to get the score."""
        return np.array(self._values, dtype=np.int64) * SIGNS

    def replace(self, **changes: int) -> EvalParams:
        d = self.as_dict()
        for k, v in changes.items():
            if k not in d:
                raise KeyError(k)
            d[k] = v
        return EvalParams.from_mapping(d)


TUNED_PARAMS = EvalParams([
    83, 322, 323, 478, 954, 2, 4, 5, 21, 10, 3, 7, 5, 7, 8, 5, 44, 30, 1, 21, 32, 2, 2, 48, 12,
    6, 7, 3, 0, 27, 17, 12, 11, 3, 8,
])


def format_params(params: EvalParams) -> str:
    width = max(len(n) for n in PARAM_NAMES)
    return "".join(f"{name:<{width}} = {v}\n" for name, v in params.as_dict().items())


def parse_params(text: str) -> EvalParams:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"([A-Z0-9_]+)\s*=\s*(-?\d+)", line)
        if not m:
            raise ValueError(f"line {lineno}: expected NAME=value, got {raw!r}")
        values[m.group(1)] = int(m.group(2))
    return EvalParams.from_mapping(values)


def write_params(path: str | Path, params: EvalParams) -> None:
    Path(path).write_text(format_params(params))


def read_params(path: str | Path) -> EvalParams:
    return parse_params(Path(path).read_text())


# --- feature kernel -------------------------------------------------------

@njit(cache=True)
def _rel_rank(sq, color):
    r = sq // 8
    return r if color == 1 else 7 - r


@njit(cache=True)
def _centrality(x):
    d = min(x, 7 - x)
    return min(d, 3)


@njit(cache=True)
def _pawn_tables(board, color):
    """Per-file pawn counts and relative-rank extremes for `color`.

    Ranks are relative to `color` (0 = its back rank).
    """
    count = np.zeros(8, np.int64)
    lo = np.full(8, 8, np.int64)   # least advanced
    hi = np.full(8, -1, np.int64)  # most advanced
    for sq in range(64):
        if board[sq] == PAWN * color:
            f = sq % 8
            rr = _rel_rank(sq, color)
            count[f] += 1
            lo[f] = min(lo[f], rr)
            hi[f] = max(hi[f], rr)
    return count, lo, hi


@njit(cache=True)
def _is_passed(board, sq, color):
    f = sq % 8
    rr = _rel_rank(sq, color)
    for s in range(64):
        if board[s] == -PAWN * color:
            ef = s % 8
            if abs(ef - f) <= 1 and _rel_rank(s, color) > rr:
                return False
    return True


@njit(cache=True)
def _weak_pawn_flags(board, color, out):
    """Mark isolated or backward pawns of `color` in `out` (bool per square)."""
    count, _, _ = _pawn_tables(board, color)
    for sq in range(64):
        out[sq] = False
        if board[sq] != PAWN * color:
            continue
        f = sq % 8
        if _isolated(count, f):
            out[sq] = True
        elif _backward(board, sq, color):
            out[sq] = True


@njit(cache=True)
def _isolated(count, f):
    left = count[f - 1] if f > 0 else 0
    right = count[f + 1] if f < 7 else 0
    return left == 0 and right == 0


@njit(cache=True)
def _backward(board, sq, color):
    f = sq % 8
    rr = _rel_rank(sq, color)
    neighbours = 0
    for s in range(64):
        if board[s] == PAWN * color and abs(s % 8 - f) == 1:
            neighbours += 1
            if _rel_rank(s, color) <= rr:
                return False
    if neighbours == 0:
        return False
    # stop square attacked by an enemy pawn two ranks ahead on an adjacent file
    if rr + 2 > 7:
        return False
    r2 = rr + 2 if color == 1 else 7 - (rr + 2)
    for df in (-1, 1):
        ef = f + df
        if 0 <= ef < 8 and board[r2 * 8 + ef] == -PAWN * color:
            return True
    return False


@njit(cache=True)
def _attack_count(board, sq, kind, color, zone, friendly_excluded):
    """Count squares attacked by a piece; optionally only inside `zone`."""
    n = 0
    if kind == KNIGHT:
        for k in range(8):
            t = KNIGHT_TARGETS[sq, k]
            if t < 0:
                continue
            if friendly_excluded and board[t] * color > 0:
                continue
            if zone[t]:
                n += 1
        return n
    d0 = 4 if kind == BISHOP else 0
    d1 = 4 if kind == ROOK else 8
    for d in range(d0, d1):
        for k in range(7):
            t = RAYS[sq, d, k]
            if t < 0:
                break
            p = board[t]
            if not (friendly_excluded and p * color > 0) and zone[t]:
                n += 1
            if p != 0:
                break
    return n


@njit(cache=True)
def _side_features(board, color, out, sgn):
    """Add sgn * (features of `color`) into `out`."""
    enemy = -color
    own_count, own_lo, own_hi = _pawn_tables(board, color)
    en_count, _, _ = _pawn_tables(board, enemy)
    everywhere = np.ones(64, np.bool_)
    enemy_weak = np.zeros(64, np.bool_)
    _weak_pawn_flags(board, enemy, enemy_weak)

    own_king = -1
    en_king = -1
    for sq in range(64):
        if board[sq] == KING * color:
            own_king = sq
        elif board[sq] == -KING * color:
            en_king = sq

    passed = np.zeros(64, np.bool_)
    rooks = np.empty(10, np.int64)
    nrooks = 0
    bishops = 0

    for sq in range(64):
        p = board[sq] * color
        if p <= 0:
            continue
        f = sq % 8
        rr = _rel_rank(sq, color)
        if p == PAWN:
            out[0] += sgn
            if _is_passed(board, sq, color):
                passed[sq] = True
                out[6] += sgn * (rr - 1)          # PAWN_ADVANCE_B
                out[7] += sgn * rr                # PASSED_PAWN_MULT
                ef, er = en_king % 8, en_king // 8
                out[12] += sgn * max(abs(ef - f), abs(er - sq // 8))
            else:
                out[5] += sgn * (rr - 1)          # PAWN_ADVANCE_A
            if _isolated(own_count, f):
                out[9] += sgn
            elif _backward(board, sq, color):
                out[10] += sgn
        elif p == KNIGHT:
            out[1] += sgn
            out[13] += sgn * (_centrality(f) + _centrality(sq // 8))
            if 3 <= rr <= 5:
                defended = False
                for df in (-1, 1):
                    pf = f + df
                    if 0 <= pf < 8 and own_count[pf] > 0:
                        psq = (sq // 8 - color) * 8 + pf
                        if board[psq] == PAWN * color:
                            defended = True
                attackable = False
                for s in range(64):
                    if board[s] == -PAWN * color and abs(s % 8 - f) == 1 and _rel_rank(s, color) > rr:
                        attackable = True
                if defended and not attackable:
                    out[14] += sgn * rr
        elif p == BISHOP:
            out[2] += sgn
            bishops += 1
            out[15] += sgn * _attack_count(board, sq, BISHOP, color, everywhere, True)
        elif p == ROOK:
            out[3] += sgn
            if nrooks < 10:
                rooks[nrooks] = sq
                nrooks += 1
        elif p == QUEEN:
            out[4] += sgn
            out[28] += sgn * _attack_count(board, sq, QUEEN, color, everywhere, True)

    if bishops >= 2:
        out[16] += sgn

    for f in range(8):
        if own_count[f] > 1:
            out[8] += sgn * (own_count[f] - 1)
    # weak squares: files c-f, relative ranks 2-4, no own pawn behind on an adjacent file
    for f in range(2, 6):
        for rr in range(1, 4):
            coverable = (own_lo[f - 1] < rr) or (own_lo[f + 1] < rr)
            if not coverable:
                out[11] += sgn

    ekf = en_king % 8
    for i in range(nrooks):
        sq = rooks[i]
        f = sq % 8
        rr = _rel_rank(sq, color)
        if f == ekf:
            out[17] += sgn
        elif abs(f - ekf) == 1:
            out[18] += sgn
            if ekf <= 1 or ekf >= 6:
                out[19] += sgn
        if rr == 6:
            out[20] += sgn
        out[22] += sgn * _attack_count(board, sq, ROOK, color, everywhere, True)
        behind = False
        for s in range(f, 64, 8):
            if passed[s] and _rel_rank(s, color) > rr:
                behind = True
        if behind:
            out[23] += sgn
        if own_count[f] == 0:
            if en_count[f] == 0:
                out[24] += sgn
            else:
                out[25] += sgn
        # first pawn up and down the file must be a weak enemy pawn
        hit = False
        for d in range(2):
            for k in range(7):
                t = RAYS[sq, d, k]
                if t < 0:
                    break
                q = board[t]
                if abs(q) == PAWN:
                    if q == -PAWN * color and enemy_weak[t]:
                        hit = True
                    break
        if hit:
            out[26] += sgn
        out[27] += sgn * _centrality(f)
        for j in range(i + 1, nrooks):
            if _clear_line(board, sq, rooks[j]):
                out[21] += sgn

    kf = own_king % 8
    if own_count[kf] == 0:
        out[29] += sgn
    if en_count[kf] == 0:
        out[32] += sgn
    for af in (kf - 1, kf + 1):
        if 0 <= af < 8:
            if own_count[af] == 0:
                out[30] += sgn
            if en_count[af] == 0:
                out[33] += sgn
    for af in range(max(kf - 1, 0), min(kf + 1, 7) + 1):
        for s in range(af, 64, 8):
            if board[s] == PAWN * color and _rel_rank(s, color) == 2:
                out[31] += sgn

    zone = np.zeros(64, np.bool_)
    zone[own_king] = True
    for k in range(8):
        t = KING_TARGETS[own_king, k]
        if t >= 0:
            zone[t] = True
    pressure = 0
    for sq in range(64):
        q = board[sq] * enemy
        if q == KNIGHT or q == BISHOP or q == ROOK or q == QUEEN:
            pressure += _attack_count(board, sq, q, enemy, zone, False)
    out[34] += sgn * pressure


@njit(cache=True)
def _clear_line(board, a, b):
    fa, ra, fb, rb = a % 8, a // 8, b % 8, b // 8
    if ra == rb:
        step = 1
    elif fa == fb:
        step = 8
    else:
        return False
    lo, hi = min(a, b), max(a, b)
    for s in range(lo + step, hi, step):
        if board[s] != 0:
            return False
    return True


@njit(cache=True)
def features_into(board, out):
    for i in range(out.shape[0]):
        out[i] = 0
    _side_features(board, 1, out, 1)
    _side_features(board, -1, out, -1)


@njit(cache=True)
def score_board(board, weights):
    """White-perspective score of a kernel board under signed weights."""
    feats = np.zeros(35, np.int64)
    features_into(board, feats)
    total = 0
    for i in range(35):
        total += feats[i] * weights[i]
    return total


@njit(cache=True)
def _features_batch(boards, out):
    for i in range(boards.shape[0]):
        features_into(boards[i], out[i])


def extract_features(p: Position) -> np.ndarray:
    """Feature vector (White minus Black) in ``PARAM_NAMES`` order."""
    board, _ = p.arrays()
    out = np.zeros(NUM_PARAMS, np.int64)
    features_into(board, out)
    return out


def feature_matrix(positions: Iterable[Position]) -> np.ndarray:
    boards = np.array([p.board for p in positions], dtype=np.int8).reshape(-1, 64)
    out = np.zeros((boards.shape[0], NUM_PARAMS), np.int64)
    _features_batch(boards, out)
    return out


def evaluate(p: Position, params: EvalParams) -> int:
    """Centipawn score from White's point of view."""
    board, _ = p.arrays()
    return int(score_board(board, params.weights()))
