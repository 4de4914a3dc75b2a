import gzip
import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mentorchess.chesscore import parse_pgn_games  # noqa: E402
from mentorchess.evalfn import TUNED_PARAMS  # noqa: E402
from mentorchess.mentor import MentorConfig  # noqa: E402
from mentorchess.training import PROFILES, build_dataset  # noqa: E402


@pytest.fixture(scope="session")
def corpus_games():
    data = resources.files("mentorchess.data").joinpath("selfplay.pgn.gz").read_bytes()
    return parse_pgn_games(gzip.decompress(data).decode())


@pytest.fixture(scope="session")
def synthetic_mentor():
    return MentorConfig(search_depth=1, hidden_params=TUNED_PARAMS)


@pytest.fixture(scope="session")
def desk_dataset(corpus_games, synthetic_mentor):
    prof = PROFILES["desk"]
    return build_dataset(corpus_games, prof.train_size, prof.test_size, synthetic_mentor, 1)


_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Records one PASS/FAIL line per acceptance criterion; returns the outcome."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
