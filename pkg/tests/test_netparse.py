import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from crnkit.netparse import (
    NetworkParseError,
    load_network,
    network_from_json,
    parse_network,
    parse_with_diagnostics,
    serialize_network,
)
from crnkit.network import ReactionNetwork

from helpers import EX11_TEXT, first_order_networks, rational_networks

F = Fraction


def test_example11_parses_with_six_reactions():
    net = parse_network(EX11_TEXT)
    assert net.d == 5 and len(net) == 6
    # first-appearance numbering
    assert net.species == ("S2", "S1", "S3", "S4", "S5")
    rates = {net.format_reaction(r): r.rate for r in net}
    assert rates == {"S2 -> S1": 2, "S1 -> 0": 2, "0 -> S2 + S1": 2, "S3 -> S4": 1, "S4 -> S5": 1, "S5 -> S3": 2}


def test_smallest_network():
    net = parse_network("0 -> S1")
    (r,) = net.reactions
    assert r.source == (0,) and r.target == (1,)


def test_coefficients_and_decimal_rate():
    net = parse_network("2 S2 -> S1 + S2 [1.5]")
    (r,) = net.reactions
    s2, s1 = net.species.index("S2"), net.species.index("S1")
    assert r.source[s2] == 2 and r.source[s1] == 0
    assert r.target[s1] == 1 and r.target[s2] == 1
    assert r.rate == F(3, 2)


def test_glued_coefficient_and_fraction():
    net = parse_network("2S1 -> 1/2 S2 [3/7]")
    (r,) = net.reactions
    assert r.source == (2, 0) and r.target == (0, F(1, 2)) and r.rate == F(3, 7)


def test_reversible_rates():
    net = parse_network("S1 <-> S2 [1e-3, 4]")
    assert net.rate((1, 0), (0, 1)) == F(1, 1000)
    assert net.rate((0, 1), (1, 0)) == 4
    single = parse_network("S1 <-> S2 [5]")
    assert {r.rate for r in single} == {5}


def _errors(text):
    net, diags = parse_with_diagnostics(text)
    assert net is None
    return [d for d in diags if d.severity == "error"]


def test_self_loop_is_error():
    (err,) = _errors("S1 -> S1")
    assert "self-loop" in err.message


def test_self_loop_detected_by_vector_equality():
    (err,) = _errors("S1 + S2 -> S2 + S1 [1]")
    assert "self-loop" in err.message


def test_duplicate_edge():
    (err,) = _errors("A -> B [1]\nA -> B [2]")
    assert "duplicate" in err.message and err.line == 2


def test_nonpositive_rates():
    assert "positive" in _errors("0 -> S1 [0]")[0].message
    assert "positive" in _errors("0 -> S1 [-2]")[0].message


def test_two_rates_on_irreversible_arrow():
    assert _errors("0 -> S1 [1, 2]")


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("A + -> B", 1, 5),
        ("A -> B [1", 1, 10),
        ("0 -> S1\nS1 => S2", 2, 4),
        ("A -> B [x]", 1, 9),
        ("A -> B; C D -> E", 1, 11),
        ("A -> B [1] extra", 1, 12),
        ("0 + S1 -> S2", 1, 3),
    ],
)
def test_syntax_error_positions(text, line, col):
    errs = _errors(text)
    assert (errs[0].line, errs[0].column) == (line, col)
    # the position lies inside the offending line
    assert errs[0].column <= len(text.splitlines()[line - 1]) + 1


def test_missing_rate_warns():
    net, diags = parse_with_diagnostics("0 -> S1")
    assert net is not None
    assert [d.severity for d in diags] == ["warning"]


def test_redundant_species_warns():
    net, diags = parse_with_diagnostics("A + C -> B + C [1]")
    assert net is not None
    assert any("C is redundant" in d.message for d in diags)


def test_comments_and_semicolons():
    net = parse_network("# header\n0 -> S1 [1] # trailing\n; ; S1 -> 0 [2]")
    assert len(net) == 2


def test_parse_error_exception_carries_diagnostics():
    with pytest.raises(NetworkParseError) as info:
        parse_network("A -> A")
    assert info.value.diagnostics


def test_empty_document():
    net = parse_network("")
    assert net.is_empty() and net.d == 0
    with pytest.raises(ValueError):
        serialize_network(net, "dsl")
    assert json.loads(serialize_network(net, "json"))["reactions"] == []


def test_round_trip_example11():
    net = parse_network(EX11_TEXT)
    assert parse_network(serialize_network(net)) == net


def test_rational_coefficient_token_preserved():
    net = parse_network("1/2 S1 -> S2 [1]")
    text = serialize_network(net)
    assert "1/2 S1" in text
    assert parse_network(text) == net


def test_json_schema_and_round_trip():
    net = parse_network("1/2 S1 -> 2 S2 [3/7]; 0 -> S1 [0.25]")
    doc = json.loads(serialize_network(net, "json"))
    assert doc["species"] == ["S1", "S2"]
    assert doc["reactions"][0] == {"source": {"S1": "1/2"}, "target": {"S2": 2}, "rate": "3/7"}
    assert doc["reactions"][1]["rate"] == 0.25
    assert network_from_json(serialize_network(net, "json")) == net


def test_json_rejects_garbage():
    with pytest.raises(NetworkParseError):
        network_from_json('{"species": ["A"], "reactions": [{"source": {"B": 1}, "target": {}}]}')


def test_load_network_by_extension(tmp_path):
    net = parse_network(EX11_TEXT)
    (tmp_path / "n.json").write_text(serialize_network(net, "json"))
    (tmp_path / "n.crn").write_text(serialize_network(net))
    assert load_network(tmp_path / "n.json") == net == load_network(tmp_path / "n.crn")


@settings(max_examples=200, deadline=None)
@given(rational_networks())
def test_dsl_round_trip_property(net: ReactionNetwork):
    again = parse_network(serialize_network(net))
    assert again == net
    assert again.species == net.species
    assert [r.rate for r in again.reactions] == [r.rate for r in net.reactions]


@settings(max_examples=100, deadline=None)
@given(first_order_networks())
def test_json_round_trip_property(net):
    assert network_from_json(serialize_network(net, "json")) == net


def test_determinism():
    text = "A -> B\nB -> A [2]\nA -> B"
    assert parse_with_diagnostics(text) == parse_with_diagnostics(text)
