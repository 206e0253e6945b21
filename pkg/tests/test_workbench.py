from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups.covers import verify_families
from coarsegroups.groups import FreeAbelian, Heisenberg
from coarsegroups.solvable import INF, asdim_bounds
from coarsegroups.workbench import (
    Call,
    Name,
    Pair,
    ParseError,
    SetLit,
    Word,
    dump,
    format_atom,
    parse,
    parse_element,
    parse_value,
)

DATA = Path(__file__).parent / "data"
CORPUS = sorted(DATA.glob("*.gw"))


def test_group_section():
    wb = parse("[group:Z2]\nkind = free_abelian\nrank = 2")
    assert wb.groups["Z2"] == FreeAbelian(2)


def test_weights_are_symmetrized():
    wb = parse("[group:Z2]\nkind = free_abelian\nrank = 2\n[weights:w1]\ngroup = Z2\nentries = (1,0):1, (0,1):1")
    entries = dict(wb.weights["w1"].entries)
    assert entries == {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}


def test_zero_weight_is_rejected_with_position():
    text = "[group:Z]\nkind = free_abelian\nrank = 1\n\n[weights:w]\ngroup = Z\nweight = 0\n"
    with pytest.raises(ParseError) as e:
        parse(text)
    assert e.value.line == 7 and e.value.column == 10
    assert "weights must be positive" in str(e.value)
    assert str(e.value).startswith("line 7, column 10:")


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("[weights:w]\ngroup = G\n", 2, "unresolved reference 'G'"),
        ("[group:Z]\nkind = free_abelian\nrank = 1\n[group:Z]\nkind = heisenberg\n", 4, "already defined"),
        ("[group:Z]\nkind = free_abelian\nrank = 1\nrank = 2\n", 4, "duplicate key"),
        ("[group:Z]\nkind = free_abelian\nrank = (1\n", 3, "expected"),
        ("[group:Z\nkind = free_abelian\n", 1, "malformed section header"),
        ("[table:Z]\n", 1, "unknown section kind"),
        ("rank = 1\n", 1, "outside of any section"),
        ("[group:P]\nkind = presented_abelian\ngenerators = 2\nrelations = 1, 2, 3\n", 4, "does not have 2 columns"),
        ("[group:Z]\nkind = free_abelian\nrank = 1\ncolour = 2\n", 4, "unknown key"),
        ("[group:Z]\nkind = free_abelian\nrank = 1/0\n", 3, "zero denominator"),
        ("[group:a]\nkind = product\nfactors = b, b\n[group:b]\nkind = product\nfactors = a, a\n", 1, "circular reference"),
        ('[series:s]\nquotients = declared(1, "unterminated)\n', 2, "unterminated string"),
    ],
)
def test_errors_carry_line_and_reason(text, line, fragment):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert e.value.line == line
    assert e.value.column >= 1
    assert fragment in str(e.value)


def test_wrong_section_kind_reference():
    text = "[group:Z]\nkind = free_abelian\nrank = 1\n[cover:c]\nkind = interval\nd = 1\n[weights:w]\ngroup = c\n"
    with pytest.raises(ParseError, match="is a cover section"):
        parse(text)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    wb = parse(path.read_text())
    text = dump(wb)
    again = parse(text)
    assert again == wb
    assert dump(again) == text
    assert again.groups == wb.groups and again.series == wb.series


def test_corpus_objects():
    integers = parse((DATA / "integers.gw").read_text())
    assert integers.context("five").norm((7,), 100) == 21
    assert not verify_families(integers.covers["tampered"], 20).ok
    assert verify_families(integers.covers["i5"], 30).ok
    lattice = parse((DATA / "lattice.gw").read_text())
    assert lattice.context("w1").norm((3, 4), 100) == 7
    assert lattice.context("double").norm((3, 4), 100) == 14
    assert lattice.covers["square"].R == 10
    series = parse((DATA / "series.gw").read_text())
    assert asdim_bounds(series.series["heisenberg"]).pair() == (3, 3)
    assert asdim_bounds(series.series["lamplighter"]).pair() == (0, 1)
    assert asdim_bounds(series.series["lamplighter_w"]).pair() == (1, 1)
    assert asdim_bounds(series.series["dyadic"]).pair() == (1, 2)
    assert asdim_bounds(series.series["free4"]).pair() == (4, 4)
    assert asdim_bounds(series.series["mixed"]).pair() == (3, 3)
    zoo = parse((DATA / "zoo.gw").read_text())
    assert isinstance(zoo.groups["H"], Heisenberg)
    assert zoo.context("p").norm(zoo.groups["P"].coerce((1, 0, 0)), 10) == Fraction(1, 2)


def test_element_literals():
    assert parse_element("(3,4)", FreeAbelian(2)) == (3, 4)
    assert parse_element(" 5 ", FreeAbelian(1)) == (5,)
    with pytest.raises(ParseError):
        parse_element("(3,4) x", FreeAbelian(2))


def test_value_syntax():
    assert parse_value("1, 2/4; -3/1") == ((1, Fraction(1, 2)), (-3,))
    assert parse_value("(1,0):3/2 # weight") == ((Pair((1, 0), Fraction(3, 2)),),)
    assert parse_value('declared(inf, "why, \\"really\\"")') == ((Call("declared", (INF, 'why, "really"')),),)
    assert parse_value("[1,-2], {0,1}, true, name") == ((Word((1, -2)), SetLit((0, 1)), True, Name("name")),)
    assert parse_value("   ") == ()


# --- property: format then parse is the identity ------------------------------

idents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True).filter(lambda s: s not in ("true", "false", "inf"))
scalars = st.one_of(
    st.integers(-10**6, 10**6),
    st.fractions(max_denominator=50).filter(lambda f: f.denominator != 1),
    st.booleans(),
    st.just(INF),
    st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=8),
    idents.map(Name),
)
atoms = st.recursive(
    scalars,
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(tuple),
        st.lists(st.integers(-5, 5).filter(bool), max_size=4).map(lambda v: Word(tuple(v))),
        st.lists(inner, max_size=3).map(lambda v: SetLit(tuple(v))),
        st.builds(Call, idents, st.lists(inner, max_size=3).map(tuple)),
    ),
    max_leaves=8,
)
items = atoms | st.builds(Pair, atoms, atoms)
values = st.lists(st.lists(items, min_size=1, max_size=3).map(tuple), min_size=1, max_size=3).map(tuple)


@given(values)
def test_value_round_trip(rows):
    text = "; ".join(", ".join(format_atom(x) for x in row) for row in rows)
    assert parse_value(text) == rows
