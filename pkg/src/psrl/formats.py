"""Text formats for automata (``ma v1``) and samples (``sample v1``)."""

from __future__ import annotations

import io
import os
from pathlib import Path
from typing import List, Union

from .automata import Alphabet, WeightedAutomaton, parse_weight
from .evalkit import Sample
from .exceptions import FormatError

PathLike = Union[str, os.PathLike]


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        yield lineno, raw.rstrip("\r")


def _weight(token: str, lineno: int) -> float:
    try:
        return parse_weight(token)
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from None


def _header(lines, magic: str):
    for lineno, line in lines:
        if line.strip() == magic:
            return
        raise FormatError(f"expected header {magic!r}", lineno)
    raise FormatError(f"missing header {magic!r}", 1)


def _alphabet(lines) -> Alphabet:
    for lineno, line in lines:
        parts = line.split()
        if not parts or parts[0] != "alphabet" or len(parts) < 2:
            raise FormatError("expected 'alphabet <sym> ...'", lineno)
        try:
            return Alphabet(tuple(parts[1:]))
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    raise FormatError("missing alphabet line", 1)


def _skip_comments(lines):
    for lineno, line in lines:
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        yield lineno, line


def parse_ma(text: str) -> WeightedAutomaton:
    """Parse an automaton; state order in the text fixes the index order."""
    lines = _skip_comments(_lines(text))
    _header(lines, "ma v1")
    alphabet = _alphabet(lines)
    names: List[str] = []
    index = {}
    init, final = [], []
    trans = {}
    for lineno, line in lines:
        parts = line.split()
        if not parts:
            continue
        kind = parts[0]
        if kind == "state":
            if trans:
                raise FormatError("state lines must precede transitions", lineno)
            if len(parts) != 4 or not parts[2].startswith("init=") or not parts[3].startswith("final="):
                raise FormatError("expected 'state <name> init=<num> final=<num>'", lineno)
            name = parts[1]
            if name in index:
                raise FormatError(f"duplicate state {name!r}", lineno)
            index[name] = len(names)
            names.append(name)
            init.append(_weight(parts[2][5:], lineno))
            final.append(_weight(parts[3][6:], lineno))
        elif kind == "trans":
            if len(parts) != 5:
                raise FormatError("expected 'trans <src> <sym> <dst> <num>'", lineno)
            src, sym, dst, num = parts[1:]
            for s in (src, dst):
                if s not in index:
                    raise FormatError(f"unknown state {s!r}", lineno)
            try:
                x = alphabet.index(sym)
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            key = (index[src], x, index[dst])
            if key in trans:
                raise FormatError(f"duplicate transition {src} {sym} {dst}", lineno)
            trans[key] = _weight(num, lineno)
        else:
            raise FormatError(f"unknown directive {kind!r}", lineno)
    return WeightedAutomaton(alphabet, names, init, final, trans)


def _num(x: float) -> str:
    # shortest text that reads back to the same binary64 value
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_ma(a: WeightedAutomaton) -> str:
    out = io.StringIO()
    out.write("ma v1\n")
    out.write("alphabet " + " ".join(a.alphabet.symbols) + "\n")
    for name, i, f in zip(a.states, a.init, a.final):
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"state name {name!r} cannot be written")
        out.write(f"state {name} init={_num(i)} final={_num(f)}\n")
    for (i, x, j), w in sorted(a.transitions.items()):
        out.write(f"trans {a.states[i]} {a.alphabet.symbols[x]} {a.states[j]} {_num(w)}\n")
    return out.getvalue()


def parse_sample(text: str) -> Sample:
    """Parse a sample; a line that is blank after trimming is the empty word."""
    lines = _lines(text)
    _header(lines, "sample v1")
    alphabet = _alphabet(lines)
    words = []
    for lineno, line in lines:
        try:
            words.append(alphabet.encode(line.split()))
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return Sample(alphabet, tuple(words))


def format_sample(sample: Sample) -> str:
    out = io.StringIO()
    out.write("sample v1\n")
    out.write("alphabet " + " ".join(sample.alphabet.symbols) + "\n")
    for w in sample:
        out.write(" ".join(sample.alphabet.decode(w)) + "\n")
    return out.getvalue()


def read_ma(path: PathLike) -> WeightedAutomaton:
    return parse_ma(Path(path).read_text(encoding="utf-8"))


def write_ma(a: WeightedAutomaton, path: PathLike):
    Path(path).write_text(format_ma(a), encoding="utf-8")


def read_sample(path: PathLike) -> Sample:
    return parse_sample(Path(path).read_text(encoding="utf-8"))


def write_sample(sample: Sample, path: PathLike):
    Path(path).write_text(format_sample(sample), encoding="utf-8")

