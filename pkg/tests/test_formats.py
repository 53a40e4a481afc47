from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psrl.automata import Alphabet, WeightedAutomaton, evaluate, words_up_to
from psrl.evalkit import Sample, random_pa, sample_from
from psrl.exceptions import FormatError
from psrl.formats import format_ma, format_sample, parse_ma, parse_sample, read_ma, read_sample, write_ma

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def same(a, b):
    return (a.alphabet == b.alphabet and a.states == b.states
            and np.array_equal(a.init, b.init) and np.array_equal(a.final, b.final)
            and a.transitions == b.transitions)


class TestMa:
    @pytest.mark.parametrize("name,fixture", [
        ("fig1c.ma", "fig1c"), ("fig2.ma", "fig2"), ("fig3b.ma", "fig3"),
        ("signs.ma", "signs"), ("geometric.ma", "geometric"),
    ])
    def test_shipped_files_match(self, request, name, fixture):
        assert same(read_ma(FIXTURES / name), request.getfixturevalue(fixture))

    def test_round_trip_exact(self, fig1c, fig2, fig3):
        for a in (fig1c, fig2, fig3, random_pa(7, 3, 0.3, seed=2)):
            assert same(parse_ma(format_ma(a)), a)

    def test_fractions_and_comments(self):
        a = parse_ma("ma v1\nalphabet x\n# note\nstate p init=1 final=1/3\n\ntrans p x p 2/3\n")
        assert a.final[0] == 1 / 3 and a.transitions[(0, 0, 0)] == 2 / 3

    def test_write_then_read(self, tmp_path, fig2):
        path = tmp_path / "f.ma"
        write_ma(fig2, path)
        b = read_ma(path)
        for w in words_up_to(2, 5):
            assert evaluate(b, w) == evaluate(fig2, w)

    @pytest.mark.parametrize("text,line", [
        ("mx v1\n", 1),
        ("ma v1\nsymbols a\n", 2),
        ("ma v1\nalphabet a a\n", 2),
        ("ma v1\nalphabet a\nstate p init=1\n", 3),
        ("ma v1\nalphabet a\nstate p init=1 final=x\n", 3),
        ("ma v1\nalphabet a\nstate p init=1 final=0\nstate p init=0 final=0\n", 4),
        ("ma v1\nalphabet a\nstate p init=1 final=0\ntrans p a q 1\n", 4),
        ("ma v1\nalphabet a\nstate p init=1 final=0\ntrans p b p 1\n", 4),
        ("ma v1\nalphabet a\nstate p init=1 final=0\ntrans p a p 1\ntrans p a p 1\n", 5),
        ("ma v1\nalphabet a\nstate p init=1 final=0\ntrans p a p 1\nstate q init=0 final=0\n", 5),
        ("ma v1\nalphabet a\nstate p init=1 final=1/0\n", 3),
        ("ma v1\nalphabet a\nedge p\n", 3),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(FormatError) as info:
            parse_ma(text)
        assert info.value.lineno == line

    def test_unwritable_state_name(self):
        a = WeightedAutomaton(["a"], ["two words"], [1], [1], {})
        with pytest.raises(ValueError):
            format_ma(a)


class TestSample:
    def test_worked_file(self, worked_sample):
        assert read_sample(FIXTURES / "worked.sample").words == worked_sample.words

    def test_blank_line_is_empty_word(self):
        s = parse_sample("sample v1\nalphabet a b\n\n   \na b\n")
        assert s.words == ((), (), (0, 1))

    def test_multichar_symbols(self):
        s = parse_sample("sample v1\nalphabet go stop\ngo go stop\n")
        assert s.words == ((0, 0, 1),)

    def test_unknown_symbol(self):
        with pytest.raises(FormatError) as info:
            parse_sample("sample v1\nalphabet a\na\nb\n")
        assert info.value.lineno == 4

    def test_missing_header(self):
        with pytest.raises(FormatError):
            parse_sample("")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 2), max_size=6), max_size=20))
    def test_round_trip(self, words):
        s = Sample(Alphabet(("a", "b", "c")), tuple(tuple(w) for w in words))
        assert parse_sample(format_sample(s)).words == s.words

    def test_generated_round_trip(self, fig2):
        s = sample_from(fig2, 200, 3)
        assert parse_sample(format_sample(s)) == s
