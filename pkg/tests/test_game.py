import pytest

from dsgame.game import (
    GameParseError,
    GameValidationError,
    Owner,
    QuantitativeGame,
    gen_lower_bound,
    gen_random,
    gen_robustness,
    gen_scalable,
    lower_bound_weights,
    parse_game,
    serialize_game,
)


def test_parse_g1(g1):
    assert g1.n_states == 2
    assert g1.n_edges == 4
    assert g1.mu == 2
    assert g1.owner == (Owner.MAX, Owner.MIN)
    assert g1.discount.value == 2


def test_parse_accepts_bytes_and_comments(g1_text):
    text = "# a comment\n\n" + g1_text.replace("init 0", "init 0   # start")
    assert parse_game(text.encode()) == parse_game(g1_text)


def test_missing_outgoing_edge(g1_text):
    text = "\n".join(l for l in g1_text.splitlines() if not l.startswith("edge 1"))
    with pytest.raises(GameValidationError, match="state 1 has no outgoing edge"):
        parse_game(text)


def test_bad_discount(g1_text):
    with pytest.raises(GameValidationError, match="discount factor must exceed 1"):
        parse_game(g1_text.replace("discount 2 1", "discount 1 1"))


def test_syntax_errors_carry_line_numbers(g1_text):
    with pytest.raises(GameParseError, match="line 6"):
        parse_game(g1_text.replace("edge 0 1 2", "edge 0 one 2"))
    with pytest.raises(GameParseError, match="line 1"):
        parse_game("frobnicate 3\n" + g1_text)


def test_bad_ids(g1_text):
    with pytest.raises(GameValidationError, match="out of range"):
        parse_game(g1_text + "edge 0 5 1\n")
    with pytest.raises(GameValidationError, match="no owner"):
        parse_game(g1_text.replace("owner 1 min\n", ""))


def test_serialize_round_trip(g1):
    data = serialize_game(g1)
    assert parse_game(data) == g1
    assert b"edge 1 1 -1" in data


def test_zero_weights_printed():
    g = QuantitativeGame(1, ["max"], 0, [(0, 0, 0)], 2)
    assert b"edge 0 0 0\n" in serialize_game(g)


def test_duplicate_edges_kept(g1_text):
    g = parse_game(g1_text + "edge 0 1 2\n")
    assert g.n_edges == 5


def test_gen_random_shapes():
    g = gen_random(1, 1, 1, 7)
    assert g.n_states == 1 and g.n_edges == 1 and g.edges[0][:2] == (0, 0)
    assert gen_random(8, 4, 3, 42) == gen_random(8, 4, 3, 42)
    assert serialize_game(gen_random(8, 4, 3, 42)) != serialize_game(gen_random(8, 4, 3, 43))
    with pytest.raises(ValueError):
        gen_random(0, 1, 1, 0)


def test_generators_validate_and_round_trip():
    for s in range(200):
        g = gen_random(1 + s % 8, 1 + s % 4, 1 + s % 3, s)
        assert all(1 <= len(out) <= 1 + s % 3 for out in g.succ)
        assert all(abs(w) <= 1 + s % 4 for _, _, w in g.edges)
        assert parse_game(serialize_game(g)) == g
    for i in range(1, 11):
        g = gen_scalable(i)
        assert g.n_states == 3 * 2**i
        assert g.mu <= 5
        assert parse_game(serialize_game(g)) == g
    for n in range(1, 7):
        g = gen_lower_bound(n)
        assert g.n_states == 6 * n + 1
        assert parse_game(serialize_game(g)) == g


def test_scalable_connected_and_deterministic():
    assert gen_scalable(2).n_states == 12
    assert gen_scalable(5).n_states == 96
    assert gen_scalable(1) == gen_scalable(1)
    g = gen_scalable(4)
    seen, stack = set(), [0]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(u for u, _ in g.succ[v])
    assert len(seen) == g.n_states
    assert all(g.owner[v] is (Owner.MAX if v % 2 == 0 else Owner.MIN) for v in range(g.n_states))


def test_lower_bound_structure():
    g = gen_lower_bound(3)
    assert g.n_states == 19
    start_edges = g.succ[0]
    assert len(start_edges) == 2
    inside = [w for s, d, w in g.edges if s != 0 and w != 0]
    assert len(inside) == 2  # one unit edge per loop
    w, _ = lower_bound_weights(3)
    assert w > 0
    assert {x for _, x in start_edges} == {0, int(w * w.denominator)}


def test_robustness_game_shape():
    g = gen_robustness()
    assert g.n_states == 200
    assert all(len(out) == 2 and out[0][0] == out[1][0] for out in g.succ)
