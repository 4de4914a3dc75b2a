"""Array-level chess rules compiled with numba.

Board: int8[64], square = rank * 8 + file (a1 = 0, h8 = 63). Empty squares
are 0, White pieces are +PAWN..+KING and Black pieces the negated codes.

State: int64[5] holding side to move (+1/-1), castling bits, en-passant
square (-1 when absent), halfmove clock and fullmove number.

Moves are packed into int32: from | to << 6 | promotion << 12 | kind << 16.
"""

from __future__ import annotations

import numpy as np
from numba import njit

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6

NORMAL, CAPTURE, CASTLE, EN_PASSANT, PROMOTION = 0, 1, 2, 3, 4

SIDE, CASTLING, EP, HALFMOVE, FULLMOVE = 0, 1, 2, 3, 4

WK, WQ, BK, BQ = 1, 2, 4, 8

MAX_MOVES = 256


def _build_tables():
    knight = np.full((64, 8), -1, np.int64)
    king = np.full((64, 8), -1, np.int64)
    # rays[sq, d] lists squares outward in direction d; d < 4 orthogonal, d >= 4 diagonal
    rays = np.full((64, 8, 7), -1, np.int64)
    # pawn_att[0, sq] squares a White pawn on sq attacks, pawn_att[1, sq] for Black
    pawn_att = np.full((2, 64, 2), -1, np.int64)
    knight_d = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
    king_d = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, 1), (1, -1), (-1, -1)]
    for sq in range(64):
        f, r = sq % 8, sq // 8
        for i, (df, dr) in enumerate(knight_d):
            if 0 <= f + df < 8 and 0 <= r + dr < 8:
                knight[sq, i] = (r + dr) * 8 + f + df
        for i, (df, dr) in enumerate(king_d):
            if 0 <= f + df < 8 and 0 <= r + dr < 8:
                king[sq, i] = (r + dr) * 8 + f + df
            nf, nr, k = f + df, r + dr, 0
            while 0 <= nf < 8 and 0 <= nr < 8:
                rays[sq, i, k] = nr * 8 + nf
                nf, nr, k = nf + df, nr + dr, k + 1
        for ci, dr in ((0, 1), (1, -1)):
            k = 0
            for df in (-1, 1):
                if 0 <= f + df < 8 and 0 <= r + dr < 8:
                    pawn_att[ci, sq, k] = (r + dr) * 8 + f + df
                    k += 1
    castle_mask = np.full(64, 15, np.int64)
    castle_mask[4] = 15 & ~(WK | WQ)
    castle_mask[7] = 15 & ~WK
    castle_mask[0] = 15 & ~WQ
    castle_mask[60] = 15 & ~(BK | BQ)
    castle_mask[63] = 15 & ~BK
    castle_mask[56] = 15 & ~BQ
    return knight, king, rays, pawn_att, castle_mask


KNIGHT_TARGETS, KING_TARGETS, RAYS, PAWN_ATTACKS, CASTLE_MASK = _build_tables()


@njit(cache=True)
def encode_move(frm, to, promo, kind):
    return frm | (to << 6) | (promo << 12) | (kind << 16)


@njit(cache=True)
def move_from(m):
    return m & 63


@njit(cache=True)
def move_to(m):
    return (m >> 6) & 63


@njit(cache=True)
def move_promo(m):
    return (m >> 12) & 7


@njit(cache=True)
def move_kind(m):
    return (m >> 16) & 7


@njit(cache=True)
def find_king(board, side):
    target = KING * side
    for sq in range(64):
        if board[sq] == target:
            return sq
    return -1


@njit(cache=True)
def is_attacked(board, sq, by):
    """True when side `by` attacks `sq` (occupant of `sq` is irrelevant)."""
    # a pawn of `by` attacks sq iff it stands where an opposite pawn on sq would attack
    ci = 1 if by == 1 else 0
    for k in range(2):
        s = PAWN_ATTACKS[ci, sq, k]
        if s >= 0 and board[s] == PAWN * by:
            return True
    for k in range(8):
        s = KNIGHT_TARGETS[sq, k]
        if s >= 0 and board[s] == KNIGHT * by:
            return True
        s = KING_TARGETS[sq, k]
        if s >= 0 and board[s] == KING * by:
            return True
    for d in range(8):
        for k in range(7):
            s = RAYS[sq, d, k]
            if s < 0:
                break
            p = board[s]
            if p != 0:
                if p * by > 0:
                    kind = p * by
                    if kind == QUEEN:
                        return True
                    if d < 4 and kind == ROOK:
                        return True
                    if d >= 4 and kind == BISHOP:
                        return True
                break
    return False


@njit(cache=True)
def in_check(board, side):
    k = find_king(board, side)
    return k >= 0 and is_attacked(board, k, -side)


@njit(cache=True)
def _add_pawn_moves(frm, to, kind, last_rank, out, n):
    if last_rank:
        pk = PROMOTION
        for promo in (QUEEN, ROOK, BISHOP, KNIGHT):
            out[n] = encode_move(frm, to, promo, pk)
            n += 1
    else:
        out[n] = encode_move(frm, to, 0, kind)
        n += 1
    return n


@njit(cache=True)
def gen_pseudo(board, st, out):
    """Write pseudo-legal moves for the side to move into `out`; return count."""
    side = st[SIDE]
    ep = st[EP]
    n = 0
    for frm in range(64):
        p = board[frm] * side
        if p <= 0:
            continue
        if p == PAWN:
            r = frm // 8
            fwd = 8 * side
            last = 7 if side == 1 else 0
            start = 1 if side == 1 else 6
            to = frm + fwd
            if 0 <= to < 64 and board[to] == 0:
                n = _add_pawn_moves(frm, to, NORMAL, to // 8 == last, out, n)
                to2 = to + fwd
                if r == start and board[to2] == 0:
                    out[n] = encode_move(frm, to2, 0, NORMAL)
                    n += 1
            ci = 0 if side == 1 else 1
            for k in range(2):
                to = PAWN_ATTACKS[ci, frm, k]
                if to < 0:
                    continue
                if board[to] * side < 0:
                    n = _add_pawn_moves(frm, to, CAPTURE, to // 8 == last, out, n)
                elif to == ep and board[to] == 0:
                    out[n] = encode_move(frm, to, 0, EN_PASSANT)
                    n += 1
        elif p == KNIGHT or p == KING:
            for k in range(8):
                to = KNIGHT_TARGETS[frm, k] if p == KNIGHT else KING_TARGETS[frm, k]
                if to < 0:
                    continue
                q = board[to] * side
                if q == 0:
                    out[n] = encode_move(frm, to, 0, NORMAL)
                    n += 1
                elif q < 0:
                    out[n] = encode_move(frm, to, 0, CAPTURE)
                    n += 1
        else:
            d0 = 4 if p == BISHOP else 0
            d1 = 4 if p == ROOK else 8
            for d in range(d0, d1):
                for k in range(7):
                    to = RAYS[frm, d, k]
                    if to < 0:
                        break
                    q = board[to] * side
                    if q == 0:
                        out[n] = encode_move(frm, to, 0, NORMAL)
                        n += 1
                    else:
                        if q < 0:
                            out[n] = encode_move(frm, to, 0, CAPTURE)
                            n += 1
                        break
    # castling: king and rook on home squares is guaranteed by the rights bits
    rights = st[CASTLING]
    if side == 1:
        if rights & WK and board[4] == KING and board[7] == ROOK and board[5] == 0 and board[6] == 0:
            if not is_attacked(board, 4, -1) and not is_attacked(board, 5, -1) and not is_attacked(board, 6, -1):
                out[n] = encode_move(4, 6, 0, CASTLE)
                n += 1
        if (rights & WQ and board[4] == KING and board[0] == ROOK and board[3] == 0
                and board[2] == 0 and board[1] == 0):
            if not is_attacked(board, 4, -1) and not is_attacked(board, 3, -1) and not is_attacked(board, 2, -1):
                out[n] = encode_move(4, 2, 0, CASTLE)
                n += 1
    else:
        if rights & BK and board[60] == -KING and board[63] == -ROOK and board[61] == 0 and board[62] == 0:
            if not is_attacked(board, 60, 1) and not is_attacked(board, 61, 1) and not is_attacked(board, 62, 1):
                out[n] = encode_move(60, 62, 0, CASTLE)
                n += 1
        if (rights & BQ and board[60] == -KING and board[56] == -ROOK and board[59] == 0
                and board[58] == 0 and board[57] == 0):
            if not is_attacked(board, 60, 1) and not is_attacked(board, 59, 1) and not is_attacked(board, 58, 1):
                out[n] = encode_move(60, 58, 0, CASTLE)
                n += 1
    return n


@njit(cache=True)
def make_move(board, st, m):
    """Apply `m` in place; return an undo token for unmake_move."""
    frm = m & 63
    to = (m >> 6) & 63
    promo = (m >> 12) & 7
    kind = (m >> 16) & 7
    side = st[SIDE]
    piece = board[frm]
    captured = board[to]
    undo = (captured + 8) | (st[CASTLING] << 4) | ((st[EP] + 1) << 8) | (st[HALFMOVE] << 16)

    board[to] = piece
    board[frm] = 0
    if kind == EN_PASSANT:
        board[to - 8 * side] = 0
    elif kind == CASTLE:
        if to == 6:
            board[5], board[7] = board[7], 0
        elif to == 2:
            board[3], board[0] = board[0], 0
        elif to == 62:
            board[61], board[63] = board[63], 0
        else:
            board[59], board[56] = board[56], 0
    if promo:
        board[to] = promo * side

    st[CASTLING] &= CASTLE_MASK[frm] & CASTLE_MASK[to]
    st[EP] = -1
    if piece * side == PAWN and (to - frm == 16 or frm - to == 16):
        # only record en passant when an enemy pawn could take
        mid = (frm + to) // 2
        f = to % 8
        if (f > 0 and board[to - 1] == -PAWN * side) or (f < 7 and board[to + 1] == -PAWN * side):
            st[EP] = mid
    if piece * side == PAWN or captured != 0 or kind == EN_PASSANT:
        st[HALFMOVE] = 0
    else:
        st[HALFMOVE] += 1
    if side == -1:
        st[FULLMOVE] += 1
    st[SIDE] = -side
    return undo


@njit(cache=True)
def unmake_move(board, st, m, undo):
    frm = m & 63
    to = (m >> 6) & 63
    promo = (m >> 12) & 7
    kind = (m >> 16) & 7
    side = -st[SIDE]
    st[SIDE] = side
    if side == -1:
        st[FULLMOVE] -= 1
    st[CASTLING] = (undo >> 4) & 15
    st[EP] = ((undo >> 8) & 255) - 1
    st[HALFMOVE] = undo >> 16
    piece = board[to]
    if promo:
        piece = PAWN * side
    board[frm] = piece
    board[to] = (undo & 15) - 8
    if kind == EN_PASSANT:
        board[to - 8 * side] = -PAWN * side
    elif kind == CASTLE:
        if to == 6:
            board[7], board[5] = board[5], 0
        elif to == 2:
            board[0], board[3] = board[3], 0
        elif to == 62:
            board[63], board[61] = board[61], 0
        else:
            board[56], board[59] = board[59], 0


@njit(cache=True)
def gen_legal(board, st, out):
    """Write legal moves into `out` (generation order); return count."""
    buf = np.empty(MAX_MOVES, np.int32)
    n = gen_pseudo(board, st, buf)
    side = st[SIDE]
    k = 0
    for i in range(n):
        m = buf[i]
        undo = make_move(board, st, m)
        if not in_check(board, side):
            out[k] = m
            k += 1
        unmake_move(board, st, m, undo)
    return k


@njit(cache=True)
def perft(board, st, depth):
    if depth == 0:
        return 1
    moves = np.empty(MAX_MOVES, np.int32)
    n = gen_legal(board, st, moves)
    if depth == 1:
        return n
    total = 0
    for i in range(n):
        undo = make_move(board, st, moves[i])
        total += perft(board, st, depth - 1)
        unmake_move(board, st, moves[i], undo)
    return total
