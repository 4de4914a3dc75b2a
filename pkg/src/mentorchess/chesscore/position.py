"""Immutable positions, moves and FEN."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel as K

WHITE, BLACK = 1, -1

PIECE_LETTERS = {1: "P", 2: "N", 3: "B", 4: "R", 5: "Q", 6: "K"}
LETTER_PIECES = {v: k for k, v in PIECE_LETTERS.items()}

MOVE_KINDS = ("normal", "capture", "castle", "en_passant", "promotion")

START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


class FenError(ValueError):
    """Malformed or illegal FEN; ``field`` names the offending FEN field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"FEN {field}: {message}")
        self.field = field


def square_name(sq: int) -> str:
    return "abcdefgh"[sq % 8] + str(sq // 8 + 1)


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in "abcdefgh" or name[1] not in "12345678":
        raise ValueError(f"bad square {name!r}")
    return (int(name[1]) - 1) * 8 + "abcdefgh".index(name[0])


@dataclass(frozen=True)
class Move:
    from_sq: int
    to_sq: int
    promotion: int | None = None
    kind: str = "normal"

    @property
    def uci(self) -> str:
        promo = PIECE_LETTERS[self.promotion].lower() if self.promotion else ""
        return square_name(self.from_sq) + square_name(self.to_sq) + promo

    def __str__(self) -> str:
        return self.uci

    def encode(self) -> int:
        return K.encode_move(self.from_sq, self.to_sq, self.promotion or 0, MOVE_KINDS.index(self.kind))

    @classmethod
    def decode(cls, m: int) -> Move:
        m = int(m)
        promo = (m >> 12) & 7
        return cls(m & 63, (m >> 6) & 63, promo or None, MOVE_KINDS[(m >> 16) & 7])


@dataclass(frozen=True)
class Position:
    """A complete chess position. Validated on construction."""

    board: tuple[int, ...]
    side_to_move: int = WHITE
    castling: int = 0  # bit set of kernel.WK/WQ/BK/BQ
    ep_square: int | None = None
    halfmove_clock: int = 0
    fullmove_number: int = 1

    def __post_init__(self):
        b = self.board
        if len(b) != 64:
            raise FenError("placement", "board must have 64 squares")
        if b.count(K.KING) != 1 or b.count(-K.KING) != 1:
            raise FenError("placement", "each side needs exactly one king")
        if any(abs(b[sq]) == K.PAWN for sq in (*range(8), *range(56, 64))):
            raise FenError("placement", "pawn on first or last rank")
        for color in (WHITE, BLACK):
            if sum(1 for p in b if p * color == K.PAWN) > 8:
                raise FenError("placement", "more than 8 pawns")
            if sum(1 for p in b if p * color > 0) > 16:
                raise FenError("placement", "more than 16 pieces")
        if self.side_to_move not in (WHITE, BLACK):
            raise FenError("side", "side to move must be w or b")
        homes = ((K.WK, 4, K.KING, 7), (K.WQ, 4, K.KING, 0),
                 (K.BK, 60, -K.KING, 63), (K.BQ, 60, -K.KING, 56))
        for bit, ksq, king, rsq in homes:
            if self.castling & bit and (b[ksq] != king or b[rsq] != K.ROOK * (1 if king > 0 else -1)):
                raise FenError("castling", "right set without king and rook on home squares")
        if self.ep_square is not None:
            want_rank = 5 if self.side_to_move == WHITE else 2
            if self.ep_square // 8 != want_rank:
                raise FenError("en_passant", f"square {square_name(self.ep_square)} on wrong rank")
        if self.halfmove_clock < 0 or self.fullmove_number < 1:
            raise FenError("counters", "clocks out of range")

    @classmethod
    def start(cls) -> Position:
        return parse_fen(START_FEN)

    def piece_at(self, sq: int) -> int:
        return self.board[sq]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Fresh (board, state) arrays for the kernels."""
        board = np.array(self.board, dtype=np.int8)
        ep = -1 if self.ep_square is None else self.ep_square
        st = np.array([self.side_to_move, self.castling, ep, self.halfmove_clock, self.fullmove_number],
                      dtype=np.int64)
        return board, st

    @classmethod
    def from_arrays(cls, board: np.ndarray, st: np.ndarray) -> Position:
        ep = int(st[K.EP])
        return cls(tuple(int(x) for x in board), int(st[K.SIDE]), int(st[K.CASTLING]),
                   None if ep < 0 else ep, int(st[K.HALFMOVE]), int(st[K.FULLMOVE]))

    def in_check(self) -> bool:
        board, _ = self.arrays()
        return bool(K.in_check(board, self.side_to_move))

    def legal_moves(self) -> list[Move]:
        """Legal moves sorted by from-square, to-square, promotion piece."""
        board, st = self.arrays()
        out = np.empty(K.MAX_MOVES, np.int32)
        n = K.gen_legal(board, st, out)
        moves = [Move.decode(m) for m in out[:n]]
        moves.sort(key=lambda m: (m.from_sq, m.to_sq, m.promotion or 0))
        return moves

    def push(self, move: Move) -> Position:
        """Return the position after `move` (assumed legal)."""
        board, st = self.arrays()
        K.make_move(board, st, move.encode())
        return Position.from_arrays(board, st)

    def fen(self) -> str:
        return format_fen(self)

    def key(self) -> tuple:
        """Identity for repetition detection (placement, side, castling, en passant)."""
        return (self.board, self.side_to_move, self.castling, self.ep_square)

    def mirror(self) -> Position:
        """Flip ranks and swap colors."""
        board = [0] * 64
        for sq, p in enumerate(self.board):
            board[sq ^ 56] = -p
        c = self.castling
        castling = ((c & 3) << 2) | ((c >> 2) & 3)
        ep = None if self.ep_square is None else self.ep_square ^ 56
        return Position(tuple(board), -self.side_to_move, castling, ep, self.halfmove_clock,
                        self.fullmove_number)

    def __str__(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            row = []
            for f in range(8):
                p = self.board[r * 8 + f]
                row.append("." if p == 0 else (PIECE_LETTERS[p] if p > 0 else PIECE_LETTERS[-p].lower()))
            rows.append(" ".join(row))
        return "\n".join(rows)


def generate_moves(p: Position) -> list[Move]:
    return p.legal_moves()


def parse_fen(text: str) -> Position:
    fields = text.split()
    if not 4 <= len(fields) <= 6:
        raise FenError("fields", f"expected 4-6 fields, got {len(fields)}")
    placement, side, castling, ep = fields[:4]

    ranks = placement.split("/")
    if len(ranks) != 8:
        raise FenError("placement", "expected 8 ranks")
    board = [0] * 64
    for i, row in enumerate(ranks):
        r = 7 - i
        f = 0
        for ch in row:
            if ch.isdigit():
                if ch == "0" or f + int(ch) > 8:
                    raise FenError("placement", f"bad rank {row!r}")
                f += int(ch)
            elif ch.upper() in LETTER_PIECES:
                if f >= 8:
                    raise FenError("placement", f"rank {row!r} too long")
                kind = LETTER_PIECES[ch.upper()]
                board[r * 8 + f] = kind if ch.isupper() else -kind
                f += 1
            else:
                raise FenError("placement", f"bad character {ch!r}")
        if f != 8:
            raise FenError("placement", f"rank {row!r} does not cover 8 files")

    if side not in ("w", "b"):
        raise FenError("side", f"bad side {side!r}")

    rights = 0
    if castling != "-":
        bits = {"K": K.WK, "Q": K.WQ, "k": K.BK, "q": K.BQ}
        for ch in castling:
            if ch not in bits or rights & bits[ch]:
                raise FenError("castling", f"bad castling field {castling!r}")
            rights |= bits[ch]

    ep_sq = None
    if ep != "-":
        try:
            ep_sq = parse_square(ep)
        except ValueError:
            raise FenError("en_passant", f"bad square {ep!r}") from None

    try:
        half = int(fields[4]) if len(fields) > 4 else 0
        full = int(fields[5]) if len(fields) > 5 else 1
    except ValueError:
        raise FenError("counters", "non-integer move counters") from None

    return Position(tuple(board), WHITE if side == "w" else BLACK, rights, ep_sq, half, full)


def format_fen(p: Position) -> str:
    rows = []
    for r in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            piece = p.board[r * 8 + f]
            if piece == 0:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            letter = PIECE_LETTERS[abs(piece)]
            row += letter if piece > 0 else letter.lower()
        if empty:
            row += str(empty)
        rows.append(row)
    castling = "".join(ch for ch, bit in (("K", K.WK), ("Q", K.WQ), ("k", K.BK), ("q", K.BQ))
                       if p.castling & bit) or "-"
    ep = "-" if p.ep_square is None else square_name(p.ep_square)
    side = "w" if p.side_to_move == WHITE else "b"
    return f"{'/'.join(rows)} {side} {castling} {ep} {p.halfmove_clock} {p.fullmove_number}"


def canonical_fen(text: str) -> str:
    """Normalized 6-field FEN (default counters filled in)."""
    return format_fen(parse_fen(text))


def position_id(p: Position) -> str:
    """Stable identifier for caches: FEN without the move counters."""
    return " ".join(format_fen(p).split()[:4])
