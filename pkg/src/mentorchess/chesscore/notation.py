"""SAN, PGN and EPD."""

from __future__ import annotations

import re

from .position import (LETTER_PIECES, PIECE_LETTERS, START_FEN, Move, Position, parse_fen,
                       square_name)


class SanError(ValueError):
    pass


class PgnError(ValueError):
    def __init__(self, message: str, game_index: int, ply: int):
        super().__init__(f"game {game_index}, ply {ply}: {message}")
        self.game_index = game_index
        self.ply = ply


class EpdError(ValueError):
    def __init__(self, opcode: str, message: str):
        super().__init__(f"EPD opcode {opcode!r}: {message}")
        self.opcode = opcode


_SAN_RE = re.compile(r"^([NBRQK])?([a-h])?([1-8])?(x)?([a-h][1-8])(?:=?([NBRQ]))?$")


def move_to_san(p: Position, move: Move) -> str:
    if move.kind == "castle":
        san = "O-O" if move.to_sq % 8 == 6 else "O-O-O"
    else:
        piece = abs(p.board[move.from_sq])
        capture = move.kind in ("capture", "en_passant") or p.board[move.to_sq] != 0
        if piece == 1:
            san = ("abcdefgh"[move.from_sq % 8] + "x" if capture else "") + square_name(move.to_sq)
            if move.promotion:
                san += "=" + PIECE_LETTERS[move.promotion]
        else:
            rivals = [m for m in p.legal_moves()
                      if m.to_sq == move.to_sq and m.from_sq != move.from_sq
                      and abs(p.board[m.from_sq]) == piece]
            dis = ""
            if rivals:
                if all(m.from_sq % 8 != move.from_sq % 8 for m in rivals):
                    dis = "abcdefgh"[move.from_sq % 8]
                elif all(m.from_sq // 8 != move.from_sq // 8 for m in rivals):
                    dis = str(move.from_sq // 8 + 1)
                else:
                    dis = square_name(move.from_sq)
            san = PIECE_LETTERS[piece] + dis + ("x" if capture else "") + square_name(move.to_sq)
    after = p.push(move)
    if after.in_check():
        san += "#" if not after.legal_moves() else "+"
    return san


def parse_san(p: Position, text: str) -> Move:
    """Resolve a SAN token against the legal moves of `p`."""
    token = text.strip().rstrip("+#!?")
    legal = p.legal_moves()
    if token in ("O-O", "0-0", "O-O-O", "0-0-0"):
        file = 6 if token.count("-") == 1 else 2
        for m in legal:
            if m.kind == "castle" and m.to_sq % 8 == file:
                return m
        raise SanError(f"illegal castling {text!r}")
    match = _SAN_RE.match(token)
    if not match:
        raise SanError(f"unparseable SAN {text!r}")
    piece_letter, dis_file, dis_rank, _, dest, promo = match.groups()
    piece = LETTER_PIECES[piece_letter] if piece_letter else 1
    to_sq = (int(dest[1]) - 1) * 8 + "abcdefgh".index(dest[0])
    promotion = LETTER_PIECES[promo] if promo else None
    candidates = [
        m for m in legal
        if m.to_sq == to_sq and abs(p.board[m.from_sq]) == piece and m.kind != "castle"
        and m.promotion == promotion
        and (dis_file is None or m.from_sq % 8 == "abcdefgh".index(dis_file))
        and (dis_rank is None or m.from_sq // 8 == int(dis_rank) - 1)
    ]
    if not candidates:
        raise SanError(f"no legal move matches {text!r}")
    if len(candidates) > 1:
        raise SanError(f"ambiguous SAN {text!r}")
    return candidates[0]


_PGN_TOKEN = re.compile(
    r"""\[\s*(\w+)\s+"((?:[^"\\]|\\.)*)"\s*\]   # header
      | \{[^}]*\}                              # brace comment
      | ;[^\n]*                                # rest-of-line comment
      | \$\d+                                  # NAG
      | \(|\)
      | (1-0|0-1|1/2-1/2|\*)                   # result
      | \d+\.(?:\.\.)?                         # move number
      | e\.p\.
      | ([^\s()\[\]{};]+)                      # SAN candidate
    """,
    re.VERBOSE,
)


def parse_pgn_games(text: str) -> list[tuple[dict[str, str], list[Move]]]:
    """Parse PGN export text into (headers, mainline moves) per game.

    Comments, NAGs and variations are skipped. A ``FEN`` header sets the
    starting position.
    """
    games: list[tuple[dict[str, str], list[Move]]] = []
    headers: dict[str, str] = {}
    moves: list[Move] = []
    position: Position | None = None
    in_game = False
    depth = 0

    def finish():
        nonlocal headers, moves, position, in_game
        games.append((headers, moves))
        headers, moves, position, in_game = {}, [], None, False

    for tok in _PGN_TOKEN.finditer(text):
        whole = tok.group(0)
        if whole == "(":
            depth += 1
            continue
        if whole == ")":
            depth = max(0, depth - 1)
            continue
        if depth:
            continue
        if tok.group(1):
            if in_game and (moves or position is not None):
                finish()
            headers[tok.group(1)] = tok.group(2).replace('\\"', '"')
            continue
        if tok.group(3):
            finish()
            continue
        san = tok.group(4)
        if san is None or san.startswith(("{", ";", "$")):
            continue
        if position is None:
            position = start_position(headers, len(games))
        in_game = True
        try:
            move = parse_san(position, san)
        except SanError as exc:
            raise PgnError(str(exc), len(games), len(moves) + 1) from None
        moves.append(move)
        position = position.push(move)
    if in_game or headers:
        finish()
    return games


def start_position(headers: dict[str, str], game_index: int = 0) -> Position:
    fen = headers.get("FEN")
    if fen is None:
        return parse_fen(START_FEN)
    try:
        return parse_fen(fen)
    except ValueError as exc:
        raise PgnError(f"bad FEN header: {exc}", game_index, 0) from None


def replay(headers: dict[str, str], moves: list[Move]) -> list[Position]:
    """Positions before each move plus the final position."""
    p = start_position(headers)
    out = [p]
    for m in moves:
        p = p.push(m)
        out.append(p)
    return out


def game_to_pgn(headers: dict[str, str], moves: list[Move], start: Position | None = None) -> str:
    p = start or start_position(headers)
    lines = [f'[{k} "{v}"]' for k, v in headers.items()]
    words = []
    for m in moves:
        if p.side_to_move == 1:
            words.append(f"{p.fullmove_number}.")
        elif not words:
            words.append(f"{p.fullmove_number}...")
        words.append(move_to_san(p, m))
        p = p.push(m)
    words.append(headers.get("Result", "*"))
    body, line = [], ""
    for w in words:
        if len(line) + len(w) + 1 > 79:
            body.append(line)
            line = w
        else:
            line = f"{line} {w}" if line else w
    body.append(line)
    return "\n".join(lines) + "\n\n" + "\n".join(body) + "\n"


_OPCODE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def parse_epd(line: str) -> tuple[Position, dict]:
    """Parse an EPD record. ``bm`` becomes a list of Moves, ``id`` a string."""
    fields = line.strip().split(None, 4)
    if len(fields) < 4:
        raise EpdError("", "expected 4 FEN fields")
    position = parse_fen(" ".join(fields[:4]))
    ops: dict = {}
    rest = fields[4] if len(fields) > 4 else ""
    for chunk in _split_ops(rest):
        parts = chunk.split(None, 1)
        name = parts[0]
        if not _OPCODE.fullmatch(name):
            raise EpdError(name, "invalid opcode name")
        operand = parts[1].strip() if len(parts) > 1 else ""
        if name in ("bm", "am"):
            if not operand:
                raise EpdError(name, "missing operand")
            try:
                ops[name] = [parse_san(position, tok) for tok in operand.split()]
            except SanError as exc:
                raise EpdError(name, str(exc)) from None
        elif name == "id":
            if not (len(operand) >= 2 and operand[0] == operand[-1] == '"'):
                raise EpdError(name, "operand must be a quoted string")
            ops[name] = operand[1:-1]
        else:
            ops[name] = operand.strip('"')
    return position, ops


def _split_ops(text: str) -> list[str]:
    chunks, cur, quoted = [], "", False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == ";" and not quoted:
            if cur.strip():
                chunks.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if quoted:
        raise EpdError(cur.split()[0] if cur.split() else "", "unterminated string")
    if cur.strip():
        raise EpdError(cur.split()[0], "missing terminating semicolon")
    return chunks
