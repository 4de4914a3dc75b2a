"""EPD tactical-suite scoring."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..chesscore import Move, Position, parse_epd
from ..evalfn import EvalParams
from .search import search_best_move


@dataclass(frozen=True)
class EpdRecord:
    id: str
    position: Position
    best_moves: tuple[Move, ...]


@dataclass(frozen=True)
class SuiteOutcome:
    id: str
    solved: bool
    chosen_move: Move


@dataclass
class SuiteResult:
    outcomes: list[SuiteOutcome]

    @property
    def solved(self) -> int:
        return sum(o.solved for o in self.outcomes)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "solved", "chosen_move"])
        for o in self.outcomes:
            w.writerow([o.id, int(o.solved), o.chosen_move.uci])
        return buf.getvalue()


def parse_epd_suite(text: str) -> list[EpdRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        p, ops = parse_epd(line)
        if "bm" not in ops:
            raise ValueError(f"line {lineno}: record has no bm opcode")
        records.append(EpdRecord(ops.get("id", str(lineno)), p, tuple(ops["bm"])))
    return records


def load_suite(path: str | Path | None = None) -> list[EpdRecord]:
    """Records from an EPD file, or the bundled mini-suite when `path` is None."""
    if path is None:
        text = resources.files("mentorchess.data").joinpath("minisuite.epd").read_text()
    else:
        text = Path(path).read_text()
    return parse_epd_suite(text)


def run_epd_suite(records: list[EpdRecord], params: EvalParams, depth: int,
                  quiesce: bool = False) -> SuiteResult:
    """A record is solved when the searched move is one of its bm moves."""
    outcomes = []
    for r in records:
        m = search_best_move(r.position, params, depth, quiesce)
        outcomes.append(SuiteOutcome(r.id, m in r.best_moves, m))
    return SuiteResult(outcomes)
