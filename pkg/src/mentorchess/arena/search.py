"""Fixed-depth negamax with alpha-beta pruning."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..chesscore import Move, Position
from ..chesscore import kernel as K
from ..evalfn import EvalParams, score_board

MATE = 100_000
INF = 1_000_000

# victim/attacker values used only for move ordering
_ORDER_VALUE = np.array([0, 1, 3, 3, 5, 9, 20], np.int64)


class TerminalPositionError(ValueError):
    """Raised when asked to search a position with no legal moves."""

    def __init__(self, checkmate: bool):
        super().__init__("checkmate" if checkmate else "stalemate")
        self.checkmate = checkmate


@njit(cache=True)
def _order(board, st, moves, n, root):
    """Sort moves in place: captures/promotions by MVV-LVA, then (at the root)
    checking moves and pawn moves, then by side-relative squares.

    Relative squares make the order identical for color-mirrored positions.
    Ties keep the first move, so the root order is what a flat evaluation
    plays: checks and pawn advances make progress instead of shuffling.
    """
    side = st[K.SIDE]
    flip = 0 if side == 1 else 56
    keys = np.empty(n, np.int64)
    for i in range(n):
        m = moves[i]
        frm = m & 63
        to = (m >> 6) & 63
        promo = (m >> 12) & 7
        kind = (m >> 16) & 7
        gain = 0
        if kind == K.EN_PASSANT:
            gain = 10 * _ORDER_VALUE[1] - _ORDER_VALUE[1] + 100
        elif board[to] != 0:
            gain = 10 * _ORDER_VALUE[abs(board[to])] - _ORDER_VALUE[abs(board[frm])] + 100
        if promo:
            gain += 10 * _ORDER_VALUE[promo]
        if root and gain == 0:
            undo = K.make_move(board, st, m)
            if K.in_check(board, -side):
                gain = 50
            K.unmake_move(board, st, m, undo)
            if gain == 0 and abs(board[frm]) == K.PAWN:
                gain = 20
        keys[i] = ((1000 - gain) << 20) | ((frm ^ flip) << 14) | ((to ^ flip) << 8) | (7 - promo)
    idx = np.argsort(keys)
    tmp = moves[:n].copy()
    for i in range(n):
        moves[i] = tmp[idx[i]]


@njit(cache=True)
def _search(board, st, depth, alpha, beta, weights, ply, quiesce, counter, root_best, excluded):
    """Negamax value for the side to move; depth <= 0 is the horizon (capture search
    when `quiesce`). At ply 0 the chosen move is stored in root_best[0] and moves
    listed in `excluded` are skipped.

    A single self-recursive kernel: numba's on-disk cache cannot hold recursive
    functions that are called from other compiled functions.
    """
    counter[0] += 1
    side = st[K.SIDE]
    moves = np.empty(K.MAX_MOVES, np.int32)
    if depth <= 0:
        stand = side * score_board(board, weights)
        if not quiesce or stand >= beta:
            return stand
        if stand > alpha:
            alpha = stand
        n = K.gen_legal(board, st, moves)
        k = 0
        for i in range(n):
            kind = (moves[i] >> 16) & 7
            if kind == K.CAPTURE or kind == K.EN_PASSANT or (kind == K.PROMOTION and board[(moves[i] >> 6) & 63] != 0):
                moves[k] = moves[i]
                k += 1
        n = k
        best = stand
    else:
        n = K.gen_legal(board, st, moves)
        if n == 0:
            if K.in_check(board, side):
                return -MATE + ply
            return 0
        best = -INF
    _order(board, st, moves, n, ply == 0)
    for i in range(n):
        if ply == 0 and len(excluded) > 0:
            skip = False
            for e in excluded:
                if e == moves[i]:
                    skip = True
            if skip:
                continue
        undo = K.make_move(board, st, moves[i])
        score = -_search(board, st, depth - 1, -beta, -alpha, weights, ply + 1, quiesce, counter,
                         root_best, excluded)
        K.unmake_move(board, st, moves[i], undo)
        # strict improvement keeps the first of equally scored moves
        if score > best:
            best = score
            if ply == 0:
                root_best[0] = moves[i]
            if score > alpha:
                alpha = score
                if alpha >= beta:
                    break
    return best


_NONE = np.zeros(0, np.int64)


def search_root(board: np.ndarray, st: np.ndarray, depth: int, weights: np.ndarray,
                quiesce: bool, excluded: np.ndarray | None = None) -> tuple[int, int, int]:
    """(best move, score for side to move, nodes); move is -1 when none remain."""
    counter = np.zeros(1, np.int64)
    best = np.full(1, -1, np.int64)
    skip = _NONE if excluded is None else np.asarray(excluded, np.int64)
    score = _search(board, st, max(depth, 1), -INF, INF, weights, 0, quiesce, counter, best, skip)
    return int(best[0]), int(score), int(counter[0])


def search_score(board: np.ndarray, st: np.ndarray, depth: int, weights: np.ndarray,
                 quiesce: bool) -> int:
    """Negamax value of the position for the side to move."""
    counter = np.zeros(1, np.int64)
    best = np.full(1, -1, np.int64)
    return int(_search(board, st, depth, -INF, INF, weights, 0, quiesce, counter, best, _NONE))


def search_best_move(p: Position, params: EvalParams, depth: int, quiesce: bool = False) -> Move:
    """Best move by plain alpha-beta negamax to `depth` plies."""
    move, _ = search(p, params, depth, quiesce)
    return move


def search(p: Position, params: EvalParams, depth: int, quiesce: bool = False) -> tuple[Move, int]:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    board, st = p.arrays()
    m, score, _ = search_root(board, st, depth, params.weights(), quiesce)
    if m < 0:
        raise TerminalPositionError(p.in_check())
    return Move.decode(m), int(score)


def negamax_value(p: Position, params: EvalParams, depth: int, quiesce: bool = False) -> int:
    """Search value from the side to move's point of view (depth 0 = static)."""
    board, st = p.arrays()
    return int(search_score(board, st, depth, params.weights(), quiesce))
