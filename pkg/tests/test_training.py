import numpy as np
import pytest

from mentorchess.arena import play_game
from mentorchess.chesscore import Position, parse_fen, position_id
from mentorchess.evalfn import TUNED_PARAMS, EvalParams, evaluate, feature_matrix
from mentorchess.ga import GAConfig
from mentorchess.genome import encode
from mentorchess.mentor import MentorScore
from mentorchess.training import (BOOK_PLIES, PROFILES, Dataset, ReportWriter, SamplingError,
                                  build_dataset, eligible_positions, organism_error,
                                  population_errors, read_dataset, run_evolution,
                                  sample_positions, write_dataset)


def _game(plies=40):
    rec = play_game(TUNED_PARAMS, EvalParams.material_only(), 1, Position.start(), max_plies=plies)
    assert len(rec.moves) == plies
    return {}, rec.moves


def test_profiles():
    desk = PROFILES["desk"]
    assert (desk.population_size, desk.generations, desk.positions_per_generation,
            desk.train_size, desk.test_size) == (50, 100, 500, 1000, 1000)
    paper = PROFILES["paper"]
    assert (paper.population_size, paper.generations, paper.positions_per_generation,
            paper.train_size, paper.test_size) == (1000, 300, 1000, 5000, 5000)


class TestSampling:
    def test_single_game(self):
        headers, moves = _game()
        positions = [Position.start()]
        for m in moves:
            positions.append(positions[-1].push(m))
        allowed = {position_id(p): i for i, p in enumerate(positions[:-1])
                   if i >= BOOK_PLIES and p.side_to_move == 1 and not p.in_check()}
        for seed in range(10):
            [p] = sample_positions([(headers, moves)], 1, seed)
            assert position_id(p) in allowed
            assert 8 <= allowed[position_id(p)] <= 39

    def test_all_eligible_in_check_skipped(self):
        start = parse_fen("4N3/5p2/1P6/8/4p3/K1r1P3/8/6k1 w - - 0 1")
        rec = play_game(EvalParams.material_only(), EvalParams.material_only(), 2, start)
        headers = {"FEN": start.fen()}
        assert eligible_positions(headers, rec.moves) == []
        with pytest.raises(SamplingError, match="only 0"):
            sample_positions([(headers, rec.moves)], 1, 0)

    def test_short_game_has_no_positions(self):
        headers, moves = _game(8)
        assert eligible_positions(headers, moves) == []

    def test_deterministic_and_one_per_game(self, corpus_games):
        a = sample_positions(corpus_games[:200], 100, 7)
        b = sample_positions(corpus_games[:200], 100, 7)
        assert a == b
        assert len({position_id(p) for p in a}) == 100
        assert all(p.side_to_move == 1 and not p.in_check() for p in a)
        assert sample_positions(corpus_games[:200], 100, 8) != a

    def test_dedup(self):
        game = _game()
        ps = sample_positions([game] * 30, 3, 0)
        assert len({position_id(p) for p in ps}) == 3

    def test_too_few_games(self, corpus_games):
        with pytest.raises(SamplingError):
            sample_positions(corpus_games[:10], 11, 0)


class TestErrors:
    def test_self_distance_zero(self, desk_dataset):
        c = encode(TUNED_PARAMS)
        assert organism_error(c, desk_dataset.train) == 0
        assert organism_error(c, desk_dataset.test) == 0

    def test_single_position_example(self):
        p = parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
        params = EvalParams.material_only(pawn=72)
        assert evaluate(p, params) == 72
        assert organism_error(encode(params), [(p, MentorScore(position_id(p), 100))]) == 28

    def test_clamped_bound(self):
        p = parse_fen("4k3/8/8/8/8/8/QQQQ4/4K3 w - - 0 1")
        huge = EvalParams.material_only(queen=1023)
        assert evaluate(p, huge) > 3000
        err = organism_error(encode(huge), [(p, MentorScore(position_id(p), -3000))])
        assert err == 6000

    def test_population_errors_match_loop(self, desk_dataset):
        rng = np.random.default_rng(0)
        params = np.column_stack([rng.integers(0, 1024, (8, 5)), rng.integers(0, 64, (8, 30))])
        batch = desk_dataset.train[:200]
        feats = feature_matrix([p for p, _ in batch])
        targets = np.array([s.score_cp for _, s in batch])
        got = population_errors(params, feats, targets)
        for row, e in zip(params, got):
            ep = EvalParams(row)
            expected = np.mean([abs(s.score_cp - max(-3000, min(3000, evaluate(p, ep))))
                                for p, s in batch])
            assert e == pytest.approx(expected, abs=1e-9)

    def test_empty_batch(self):
        with pytest.raises(ValueError):
            organism_error(encode(TUNED_PARAMS), [])


class TestDataset:
    def test_overlap_rejected(self, desk_dataset):
        with pytest.raises(ValueError, match="both"):
            Dataset(desk_dataset.train[:5], desk_dataset.train[3:8])

    def test_round_trip(self, desk_dataset, tmp_path):
        write_dataset(tmp_path, desk_dataset)
        back = read_dataset(tmp_path)
        assert back.digest() == desk_dataset.digest()
        assert len(back.train) == 1000 and len(back.test) == 1000
        line = (tmp_path / "train.tsv").read_text().splitlines()[0]
        fen, score = line.split("\t")
        assert len(fen.split()) == 4 and int(score) == desk_dataset.train[0][1].score_cp

    def test_bad_file_names_line(self, tmp_path):
        (tmp_path / "train.tsv").write_text("8/8/8/8/8/8/8/8 w - -\t3\n")
        (tmp_path / "test.tsv").write_text("")
        with pytest.raises(ValueError, match="train.tsv:1"):
            read_dataset(tmp_path)

    def test_build_is_deterministic(self, corpus_games, synthetic_mentor):
        a = build_dataset(corpus_games[:300], 50, 50, synthetic_mentor, 3)
        b = build_dataset(corpus_games[:300], 50, 50, synthetic_mentor, 3)
        assert a.digest() == b.digest()
        assert all(s.score_cp == evaluate(p, TUNED_PARAMS) for p, s in a.train)


class TestEvolution:
    def test_zero_generations(self, desk_dataset):
        res = run_evolution(desk_dataset, GAConfig(population_size=10, generations=0,
                                                   positions_per_generation=100, seed=1))
        assert res.reports == []
        assert res.best.error_cp > 0 and res.test_error is not None

    def test_improves(self, desk_dataset):
        cfg = GAConfig(population_size=50, generations=100, positions_per_generation=500, seed=0)
        res = run_evolution(desk_dataset, cfg)
        assert len(res.reports) == 100
        assert all(r.wall_time > 0 for r in res.reports)
        assert res.reports[-1].best_error_cp < res.reports[0].best_error_cp

    def test_fixed_sample_monotone(self, desk_dataset):
        cfg = GAConfig(population_size=20, generations=30, positions_per_generation=200, seed=2)
        best = [r.best_error_cp for r in run_evolution(desk_dataset, cfg, resample=False).reports]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))

    def test_needs_enough_training_positions(self, desk_dataset):
        with pytest.raises(ValueError):
            run_evolution(desk_dataset, GAConfig(population_size=4, generations=1,
                                                 positions_per_generation=1001))

    def test_searched_individuals(self, desk_dataset):
        small = Dataset(desk_dataset.train[:20], desk_dataset.test[:10])
        cfg = GAConfig(population_size=4, generations=2, positions_per_generation=10, seed=0)
        res = run_evolution(small, cfg, individual_depth=1)
        assert len(res.reports) == 2 and res.test_error >= 0

    def test_report_files(self, desk_dataset, tmp_path):
        cfg = GAConfig(population_size=10, generations=5, positions_per_generation=50, seed=4)
        outputs = []
        for run in ("a", "b"):
            with ReportWriter(tmp_path / run) as w:
                run_evolution(desk_dataset, cfg, on_generation=w)
            outputs.append((tmp_path / run / "generations.csv").read_bytes())
        assert outputs[0] == outputs[1]
        lines = outputs[0].decode().splitlines()
        assert lines[0] == "generation,best_error_cp,mean_error_cp" and len(lines) == 6
        best = (tmp_path / "a" / "best_chromosomes.txt").read_text().splitlines()
        assert len(best) == 5 and len(best[0].split("\t")[1]) == 230
        assert len((tmp_path / "a" / "timing.csv").read_text().splitlines()) == 6
