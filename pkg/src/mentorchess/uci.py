"""Minimal UCI front end for the fixed-depth searcher.

Usable as an external mentor: ``python -m mentorchess.uci --params tuned.txt``.
"""

from __future__ import annotations

import argparse
import sys

from .arena.search import MATE, search_root
from .chesscore import START_FEN, parse_fen
from .chesscore.position import Move
from .evalfn import TUNED_PARAMS, EvalParams, read_params


def _score_text(score: int) -> str:
    if abs(score) > MATE - 1000:
        plies = MATE - abs(score)
        moves = (plies + 1) // 2
        return f"mate {moves if score > 0 else -moves}"
    return f"cp {score}"


def _set_position(tokens: list[str]):
    if tokens and tokens[0] == "startpos":
        p, rest = parse_fen(START_FEN), tokens[1:]
    elif tokens and tokens[0] == "fen":
        end = tokens.index("moves") if "moves" in tokens else len(tokens)
        p, rest = parse_fen(" ".join(tokens[1:end])), tokens[end:]
    else:
        raise ValueError("expected startpos or fen")
    if rest and rest[0] == "moves":
        for uci in rest[1:]:
            legal = {m.uci: m for m in p.legal_moves()}
            if uci not in legal:
                raise ValueError(f"illegal move {uci}")
            p = p.push(legal[uci])
    return p


def serve(params: EvalParams, inp=sys.stdin, out=sys.stdout, quiesce: bool = True) -> None:
    def say(line: str) -> None:
        out.write(line + "\n")
        out.flush()

    weights = params.weights()
    position = parse_fen(START_FEN)
    for raw in inp:
        tokens = raw.split()
        if not tokens:
            continue
        cmd = tokens[0]
        if cmd == "uci":
            say("id name mentorchess")
            say("id author mentorchess")
            say("uciok")
        elif cmd == "isready":
            say("readyok")
        elif cmd == "ucinewgame":
            position = parse_fen(START_FEN)
        elif cmd == "position":
            try:
                position = _set_position(tokens[1:])
            except ValueError as exc:
                say(f"info string error {exc}")
        elif cmd == "go":
            depth = 2
            if "depth" in tokens:
                depth = int(tokens[tokens.index("depth") + 1])
            board, st = position.arrays()
            m, score, nodes = search_root(board, st, depth, weights, quiesce)
            if m < 0:
                say(f"info depth 0 score {'mate 0' if position.in_check() else 'cp 0'}")
                say("bestmove 0000")
            else:
                uci = Move.decode(m).uci
                say(f"info depth {depth} score {_score_text(score)} nodes {nodes} pv {uci}")
                say(f"bestmove {uci}")
        elif cmd == "quit":
            break


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="mentorchess-uci", description=__doc__)
    ap.add_argument("--params", help="parameter file (NAME = value lines); default tuned values")
    ap.add_argument("--no-quiesce", action="store_true", help="disable capture search at the horizon")
    args = ap.parse_args(argv)
    params = read_params(args.params) if args.params else TUNED_PARAMS
    serve(params, quiesce=not args.no_quiesce)
    return 0


if __name__ == "__main__":
    sys.exit(main())
