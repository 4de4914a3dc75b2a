"""Chess rules: positions, move generation, FEN/SAN/PGN/EPD."""

from .notation import (EpdError, PgnError, SanError, game_to_pgn, move_to_san, parse_epd,
                       parse_pgn_games, parse_san, replay, start_position)
from .position import (BLACK, START_FEN, WHITE, FenError, Move, Position, canonical_fen,
                       format_fen, generate_moves, parse_fen, parse_square, position_id,
                       square_name)

__all__ = [
    "BLACK", "WHITE", "START_FEN", "EpdError", "FenError", "Move", "PgnError", "Position",
    "SanError", "canonical_fen", "format_fen", "game_to_pgn", "generate_moves", "move_to_san",
    "parse_epd", "parse_fen", "parse_pgn_games", "parse_san", "parse_square", "position_id",
    "replay", "square_name", "start_position",
]
