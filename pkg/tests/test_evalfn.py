import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mentorchess.chesscore import Position, parse_fen
from mentorchess.evalfn import (MAX_VALUES, NUM_PARAMS, PARAM_NAMES, SIGNS, TUNED_PARAMS,
                                EvalParams, evaluate, extract_features, feature_matrix,
                                format_params, parse_params, read_params, write_params)

import oracles
from oracles import random_placement_position, random_playout_position

params_st = st.lists(st.integers(0, 63), min_size=NUM_PARAMS, max_size=NUM_PARAMS).map(
    lambda v: EvalParams([x * 16 if i < 5 else x for i, x in enumerate(v)]))


def test_tuned_values():
    d = TUNED_PARAMS.as_dict()
    assert (d["PAWN_VALUE"], d["KNIGHT_VALUE"], d["BISHOP_VALUE"], d["ROOK_VALUE"], d["QUEEN_VALUE"]) == (
        83, 322, 323, 478, 954)
    assert d["BISHOP_PAIR"] == 44 and d["ROOK_BEHIND_PASSED_PAWN"] == 48 and d["QUEEN_MOBILITY"] == 0


def test_reference_feature_order_matches():
    p = Position.start()
    assert list(oracles.feature_names()) == list(PARAM_NAMES)
    assert len(oracles.reference_features(p)) == NUM_PARAMS


def test_start_position_is_zero():
    assert evaluate(Position.start(), TUNED_PARAMS) == 0


def test_single_pawn_example():
    p = parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
    f = dict(zip(PARAM_NAMES, extract_features(p)))
    nonzero = {k: int(v) for k, v in f.items() if v}
    assert nonzero == {"PAWN_VALUE": 1, "PASSED_PAWN_MULT": 1, "ISOLATED_PAWN_PENALTY": 1,
                       "WEAK_SQUARE_PENALTY": -4, "PASSED_PAWN_ENEMY_KING_DIST": 6,
                       "KING_NO_FRIENDLY_PAWN": -1, "KING_NO_ENEMY_PAWN": 1}
    # 83 + 5*1 - 10*1 + 7*4 + 5*6 + 27*1 - 11*1
    assert evaluate(p, TUNED_PARAMS) == 152


def test_zero_params_score_zero():
    p = parse_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1")
    assert evaluate(p, EvalParams.zeros()) == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_features_match_reference(seed):
    rng = random.Random(seed)
    p = random_playout_position(rng) if seed % 2 else random_placement_position(rng)
    assert extract_features(p).tolist() == oracles.reference_features(p)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), params_st)
def test_color_antisymmetry(seed, params):
    p = random_playout_position(random.Random(seed))
    assert evaluate(p.mirror(), params) == -evaluate(p, params)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), params_st)
def test_linearity(seed, params):
    p = random_playout_position(random.Random(seed))
    f = oracles.reference_features(p)
    expected = sum(s * v * x for s, v, x in zip(SIGNS.tolist(), params.values, f))
    assert evaluate(p, params) == expected


def test_adding_pawn_adds_pawn_value():
    params = EvalParams.material_only(pawn=97)
    for fen in ["4k3/8/8/8/8/8/8/4K3 w - - 0 1", "r3k3/pp6/8/8/8/8/5PPP/4K2R w - - 0 1"]:
        p = parse_fen(fen)
        board = list(p.board)
        board[27] = 1  # d4
        q = Position(tuple(board), p.side_to_move, p.castling, p.ep_square, 0, 1)
        assert evaluate(q, params) - evaluate(p, params) == 97


def test_feature_matrix_rows():
    ps = [Position.start(), parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")]
    m = feature_matrix(ps)
    assert m.shape == (2, NUM_PARAMS) and m.dtype == np.int64
    assert (m[1] == extract_features(ps[1])).all()


class TestParams:
    def test_range_errors_name_parameter(self):
        vals = list(TUNED_PARAMS.values)
        vals[5] = 64
        with pytest.raises(ValueError, match="PAWN_ADVANCE_A"):
            EvalParams(vals)
        vals[5] = 2
        vals[0] = 1024
        with pytest.raises(ValueError, match="PAWN_VALUE"):
            EvalParams(vals)
        with pytest.raises(ValueError):
            EvalParams([0] * 34)

    def test_max_values(self):
        assert EvalParams(MAX_VALUES)["QUEEN_VALUE"] == 1023
        assert EvalParams(MAX_VALUES)["KING_PRESSURE_MULT"] == 63

    def test_immutable(self):
        with pytest.raises(AttributeError):
            TUNED_PARAMS.foo = 1

    def test_replace(self):
        p = TUNED_PARAMS.replace(PAWN_VALUE=100)
        assert p["PAWN_VALUE"] == 100 and TUNED_PARAMS["PAWN_VALUE"] == 83
        with pytest.raises(KeyError):
            TUNED_PARAMS.replace(NOPE=1)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "p.txt"
        write_params(path, TUNED_PARAMS)
        assert read_params(path) == TUNED_PARAMS
        assert "ROOK_COLUMN_MULT" in path.read_text()

    def test_parse_errors(self):
        text = format_params(TUNED_PARAMS)
        with pytest.raises(ValueError, match="missing"):
            parse_params("\n".join(text.splitlines()[1:]))
        with pytest.raises(ValueError, match="unknown"):
            parse_params(text + "BOGUS = 3\n")
        with pytest.raises(ValueError, match="line"):
            parse_params("PAWN_VALUE: 83")
