import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mentorchess.chesscore import (START_FEN, EpdError, FenError, PgnError, Position, format_fen,
                                   generate_moves, move_to_san, parse_epd, parse_fen,
                                   parse_pgn_games, parse_san, replay)
from mentorchess.chesscore import kernel as K

from oracles import legal_moves as oracle_moves
from oracles import random_placement_position, random_playout_position

KIWIPETE = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"


def perft(fen, depth):
    board, state = parse_fen(fen).arrays()
    return int(K.perft(board, state, depth))


class TestFen:
    def test_start_position(self):
        p = parse_fen(START_FEN)
        assert p == Position.start()
        assert p.board[4] == K.KING and p.board[60] == -K.KING
        assert p.castling == 15 and p.ep_square is None
        assert format_fen(p) == START_FEN

    def test_missing_kings(self):
        with pytest.raises(FenError) as err:
            parse_fen("8/8/8/8/8/8/8/8 w - - 0 1")
        assert err.value.field == "placement"

    def test_minimal_position(self):
        p = parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
        assert sum(1 for x in p.board if x) == 3
        assert p.side_to_move == 1

    @pytest.mark.parametrize("fen, field", [
        ("4k3/8/8/8/8/8/8/4K2P w - - 0 1", "placement"),
        ("4k3/8/8/8/8/8/8/4K3 x - - 0 1", "side"),
        ("4k3/8/8/8/8/8/8/4K3 w K - 0 1", "castling"),
        ("4k3/8/8/8/8/8/8/4K3 w - e4 0 1", "en_passant"),
        ("4k3/8/8/8/8/8/8/4K3 w - - x 1", "counters"),
        ("4k3/8/8/8/8/8/8/4K3 w", "fields"),
        ("4k3/8/8/8/8/8/8/4K2 w - - 0 1", "placement"),
        ("4k3/8/8/8/8/8/PPPPPPPP/PPPPK3 w - - 0 1", "placement"),
    ])
    def test_errors_name_the_field(self, fen, field):
        with pytest.raises(FenError) as err:
            parse_fen(fen)
        assert err.value.field == field

    def test_four_field_fen_gets_default_counters(self):
        assert format_fen(parse_fen("4k3/8/8/8/8/8/4P3/4K3 b - -")) == "4k3/8/8/8/8/8/4P3/4K3 b - - 0 1"

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_round_trip(self, seed):
        p = random_playout_position(random.Random(seed))
        fen = format_fen(p)
        assert format_fen(parse_fen(fen)) == fen
        assert parse_fen(fen) == p

    def test_mirror_is_involution(self):
        p = parse_fen(KIWIPETE)
        assert p.mirror().mirror() == p
        assert p.mirror().side_to_move == -1
        assert p.mirror().castling == 15


class TestMoveGeneration:
    def test_start_has_20_moves(self):
        assert len(generate_moves(Position.start())) == 20

    def test_castling_position(self):
        moves = generate_moves(parse_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1"))
        assert len(moves) == 15
        assert "e1g1" in {m.uci for m in moves}

    def test_queen_box_is_stalemate(self):
        # b6 queen covers a7, b7 and b8 without giving check: no legal moves
        p = parse_fen("k7/8/1Q6/8/8/8/8/1K6 b - - 0 1")
        assert oracle_moves(p) == set()
        assert generate_moves(p) == []
        assert not p.in_check()

    def test_check_evasions(self):
        p = parse_fen("k7/8/2Q5/8/8/8/8/1K6 b - - 0 1")
        assert p.in_check()
        assert {m.uci for m in generate_moves(p)} == oracle_moves(p) == {"a8a7", "a8b8"}

    def test_order_is_sorted(self):
        moves = generate_moves(parse_fen(KIWIPETE))
        keys = [(m.from_sq, m.to_sq, m.promotion or 0) for m in moves]
        assert keys == sorted(keys)

    @pytest.mark.parametrize("depth, nodes", [(1, 20), (2, 400), (3, 8902)])
    def test_perft_start_shallow(self, depth, nodes):
        assert perft(START_FEN, depth) == nodes

    @pytest.mark.parametrize("fen, counts", [
        (KIWIPETE, [48, 2039, 97862]),
        ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", [14, 191, 2812]),
        ("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", [6, 264, 9467]),
        ("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", [44, 1486, 62379]),
    ])
    def test_perft_reference_positions(self, fen, counts):
        assert [perft(fen, d) for d in range(1, len(counts) + 1)] == counts

    def test_promotions_and_en_passant_generated(self):
        p = parse_fen("4k3/1P6/8/3pP3/8/8/8/4K3 w - d6 0 1")
        ucis = {m.uci for m in generate_moves(p)}
        assert {"b7b8q", "b7b8r", "b7b8b", "b7b8n", "e5d6"} <= ucis
        kinds = {m.uci: m.kind for m in generate_moves(p)}
        assert kinds["e5d6"] == "en_passant" and kinds["b7b8q"] == "promotion"

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_oracle_on_playouts(self, seed):
        p = random_playout_position(random.Random(seed))
        assert {m.uci for m in generate_moves(p)} == oracle_moves(p)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_oracle_on_random_placements(self, seed):
        p = random_placement_position(random.Random(seed))
        assert {m.uci for m in generate_moves(p)} == oracle_moves(p)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_make_unmake_restores_position(self, seed):
        p = random_playout_position(random.Random(seed))
        board, state = p.arrays()
        for m in generate_moves(p):
            b0, s0 = board.copy(), state.copy()
            undo = K.make_move(board, state, m.encode())
            K.unmake_move(board, state, m.encode(), undo)
            assert np.array_equal(board, b0) and np.array_equal(state, s0)
        assert Position.from_arrays(board, state) == p


class TestSan:
    def test_round_trip_all_moves(self):
        p = parse_fen(KIWIPETE)
        for m in generate_moves(p):
            assert parse_san(p, move_to_san(p, m)) == m

    def test_disambiguation(self):
        p = parse_fen("4k3/8/8/8/8/8/8/R4RK1 w - - 0 1")
        m = parse_san(p, "Rad1")
        assert m.uci == "a1d1"
        assert move_to_san(p, m) == "Rad1"

    def test_checkmate_suffix(self):
        p = parse_fen("6k1/5ppp/8/8/8/8/5PPP/R5K1 w - - 0 1")
        assert move_to_san(p, parse_san(p, "Ra8")) == "Ra8#"


class TestPgn:
    def test_minimal_game(self):
        games = parse_pgn_games("1. e4 e5 1/2-1/2")
        assert len(games) == 1
        assert [m.uci for m in games[0][1]] == ["e2e4", "e7e5"]

    def test_empty_movetext(self):
        games = parse_pgn_games('[Event "x"]\n\n1/2-1/2\n')
        assert len(games) == 1 and games[0][1] == []
        assert games[0][0]["Event"] == "x"

    def test_castle_and_en_passant(self):
        text = """[Event "t"]
[Result "*"]

1. e4 Nf6 2. e5 d5 3. exd6 e.p. {comment} Qxd6 (3... cxd6 4. d4) 4. Nf3 $1 Bg4
5. Be2 Nc6 6. O-O O-O-O *
"""
        [(headers, moves)] = parse_pgn_games(text)
        assert headers["Result"] == "*"
        by_uci = {m.uci: m for m in moves}
        assert by_uci["e5d6"].kind == "en_passant"
        assert by_uci["e1g1"].kind == "castle" and by_uci["e8c8"].kind == "castle"
        final = replay(headers, moves)[-1]
        assert final.board[6] == K.KING and final.board[5] == K.ROOK
        assert final.board[58] == -K.KING and final.board[59] == -K.ROOK
        # the replay oracle agrees that every mainline move was legal where played
        for before, m in zip(replay(headers, moves), moves):
            assert m.uci in oracle_moves(before)

    def test_multiple_games_and_fen_header(self):
        text = ('[Event "a"]\n\n1. d4 d5 1-0\n\n'
                '[Event "b"]\n[SetUp "1"]\n[FEN "4k3/8/8/8/8/8/4P3/4K3 w - - 0 1"]\n\n1. e4 Kd7 0-1\n')
        games = parse_pgn_games(text)
        assert len(games) == 2
        assert replay(*games[1])[-1].board[28] == K.PAWN

    def test_bad_san_reports_game_and_ply(self):
        with pytest.raises(PgnError) as err:
            parse_pgn_games("1. e4 e5 1-0\n\n1. d4 Ke7 0-1")
        assert (err.value.game_index, err.value.ply) == (1, 2)


class TestEpd:
    def test_bm_and_id(self):
        p, ops = parse_epd('4k3/8/8/8/8/8/4P3/4K3 w - - bm e4; id "t1";')
        assert [m.uci for m in ops["bm"]] == ["e2e4"]
        assert ops["id"] == "t1"
        assert p == parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")

    def test_no_opcodes(self):
        p, ops = parse_epd("4k3/8/8/8/8/8/4P3/4K3 w - -")
        assert ops == {}

    def test_ambiguous_bm(self):
        with pytest.raises(EpdError) as err:
            parse_epd("4k3/8/8/8/8/8/8/R4RK1 w - - bm Rd1;")
        assert err.value.opcode == "bm"

    def test_malformed_opcode(self):
        with pytest.raises(EpdError):
            parse_epd('4k3/8/8/8/8/8/4P3/4K3 w - - id "t1"')
        with pytest.raises(EpdError):
            parse_epd("4k3/8/8/8/8/8/4P3/4K3 w - - 9x foo;")
