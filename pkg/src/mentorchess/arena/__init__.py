"""Fixed-depth player, matches, Elo conversion and EPD suites."""

from .elo import UndefinedRatingError, elo_diff, elo_expected_score
from .match import (MOVE_CAP, GameRecord, MatchResult, generate_corpus, load_opening_lines,
                    load_openings, play_game, play_match)
from .search import MATE, TerminalPositionError, negamax_value, search, search_best_move
from .suite import (EpdRecord, SuiteOutcome, SuiteResult, load_suite, parse_epd_suite,
                    run_epd_suite)

__all__ = [
    "UndefinedRatingError", "elo_diff", "elo_expected_score", "MOVE_CAP", "GameRecord",
    "MatchResult", "generate_corpus", "load_opening_lines", "load_openings", "play_game",
    "play_match", "MATE", "TerminalPositionError", "negamax_value", "search",
    "search_best_move", "EpdRecord", "SuiteOutcome", "SuiteResult", "load_suite",
    "parse_epd_suite", "run_epd_suite",
]
