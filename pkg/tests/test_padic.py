import random
from fractions import Fraction

import pytest

from arboreal import catalog as cat
from arboreal.hnn import UnrootedVertex, parse_hnn, hnn_multiply
from arboreal.padic import (
    BoundaryPoint,
    boundary_apply,
    boundary_distance,
    dilation_factor_empirical,
    distance_value,
    padic_valuation,
    parse_point,
    phi_value,
    vertex_label,
)


def test_parse_and_format():
    xi = parse_point(".010")
    assert (xi.offset, xi.digits) == (1, (0, 1, 0))
    eta = parse_point("1.101")
    assert (eta.offset, eta.digits) == (0, (1, 1, 0, 1))
    assert str(eta) == "1.101"
    assert str(parse_point("001.101")) == "1.101"  # leading zeros elided
    assert str(BoundaryPoint(1, (0, 1, 0))) == ".010"
    assert parse_point(".010...").digits == (0, 1, 0)
    assert parse_point("1.").digits == (1,)
    with pytest.raises(ValueError):
        parse_point("0101")


def test_format_parse_roundtrip():
    import random
    rng = random.Random(2)
    for _ in range(100):
        x = BoundaryPoint(rng.randint(-4, 2), tuple(rng.randrange(2) for _ in range(6)))
        y = parse_point(str(x))
        lo = min(x.offset, y.offset)
        hi = min(x.end, y.end)
        assert all(x.digit(i) == y.digit(i) for i in range(lo, hi + 1))
        assert boundary_distance(x, y) is None


def test_point_validation():
    with pytest.raises(ValueError):
        BoundaryPoint(0, (2,), size=2)
    with pytest.raises(ValueError):
        BoundaryPoint(0, (0,), size=2, pad=3)


def test_distance_figure_labels():
    # xi = .010..., eta = 1.101... disagree first at position 0
    xi = parse_point(".010")
    eta = parse_point("1.101")
    assert boundary_distance(xi, eta) == 0
    assert distance_value(xi, eta) == 2  # d^{-0+1}


def test_distance_equal_to_precision():
    x = parse_point(".010")
    assert boundary_distance(x, x) is None
    longer = BoundaryPoint(1, (0, 1, 0, 1, 1))
    assert boundary_distance(x, longer) is None  # agree on the comparable range


def test_distance_spine_vs_deep():
    for k in range(5):
        spine = BoundaryPoint(1, (0,) * 8)
        y = BoundaryPoint(1, (0,) * k + (1,) + (0,) * 3)
        assert boundary_distance(spine, y) == k + 1
        assert distance_value(spine, y) == Fraction(1, 2 ** k)


def test_distance_needs_same_spine():
    with pytest.raises(ValueError):
        boundary_distance(BoundaryPoint(0, (0,), pad=0), BoundaryPoint(0, (0,), pad=1))


def test_phi_values():
    assert phi_value(BoundaryPoint(1, (0,) * 6)) == 0          # spine -> 0
    assert phi_value(parse_point(".010")) == 2                 # the uniformizer p
    assert phi_value(parse_point("1.1")) == Fraction(1, 2) + 1
    with pytest.raises(ValueError):
        phi_value(BoundaryPoint(0, (0, 1), pad=1))


def test_phi_valuation_matches_distance():
    rng = random.Random(21)
    for _ in range(200):
        offset = rng.randint(-5, 1)
        x = BoundaryPoint(offset, tuple(rng.randrange(2) for _ in range(9)))
        y = BoundaryPoint(offset, tuple(rng.randrange(2) for _ in range(9)))
        l = boundary_distance(x, y)
        if l is None:
            continue
        diff = phi_value(x) - phi_value(y)
        assert padic_valuation(diff, 2) == l - 1


def test_padic_valuation():
    assert padic_valuation(Fraction(8), 2) == 3
    assert padic_valuation(Fraction(3, 4), 2) == -2
    with pytest.raises(ValueError):
        padic_valuation(Fraction(0), 2)


def test_theta_t_moves_dot():
    action = cat.get("basilica").action()
    t = parse_hnn("t", action)
    assert str(boundary_apply(t, parse_point("1.101"), action)) == "11.01"
    T = parse_hnn("T", action)
    assert str(boundary_apply(T, parse_point("1.101"), action)) == ".1101"


def test_identity_leaves_points():
    action = cat.get("basilica").action()
    e = parse_hnn("1", action)
    x = parse_point(".0110")
    assert boundary_apply(e, x, action) == x


def test_grigorchuk_theta_a_on_rooted_points():
    # points inside T^(0) (offset 1): theta(a) acts as a, flipping the
    # first digit; oracle = the rooted action
    entry = cat.get("grigorchuk")
    action = entry.action()
    a = entry.elements()["a"]
    rng = random.Random(6)
    for _ in range(50):
        digits = tuple(rng.randrange(2) for _ in range(6))
        x = BoundaryPoint(1, digits, pad=1)
        out = boundary_apply(action.theta(a.word), x, action)
        assert out.digits == a.act(digits)
        assert out.digits[0] != digits[0]


def test_boundary_apply_composes():
    action = cat.get("basilica").action()
    rng = random.Random(13)
    words = ["t*a", "b*T", "a*b^-1", "t^2*b*T", "T*a*t", "a", "t", "T"]
    for _ in range(500):
        e1 = parse_hnn(rng.choice(words), action)
        e2 = parse_hnn(rng.choice(words), action)
        offset = rng.randint(-4, 1)
        x = BoundaryPoint(offset, tuple(rng.randrange(2) for _ in range(10)))
        lhs = boundary_apply(hnn_multiply(e1, e2, action), x, action)
        rhs = boundary_apply(e2, boundary_apply(e1, x, action), action)
        # Convention 2.2: the product acts e1 first; windows may differ in
        # padding, compare digit functions on the common known range
        lo = min(lhs.offset, rhs.offset)
        hi = min(lhs.end, rhs.end)
        assert lhs.pad == rhs.pad
        assert all(lhs.digit(i) == rhs.digit(i) for i in range(lo, hi + 1))


def test_dilation_exponents():
    for gid in ("basilica", "grigorchuk", "lamplighter"):
        entry = cat.get(gid)
        action = entry.action()
        gens = "".join(entry.generators)
        assert dilation_factor_empirical(
            action.theta(entry.element(gens).word), action, samples=1000, seed=8) == 0
        assert dilation_factor_empirical(
            parse_hnn("t", action), action, samples=1000, seed=8) == 1
        assert dilation_factor_empirical(
            parse_hnn("T", action), action, samples=1000, seed=8) == -1
        assert dilation_factor_empirical(
            parse_hnn("1", action), action, samples=100, seed=8) == 0


def test_dilation_matches_net_displacement():
    action = cat.get("basilica").action()
    for text, expected in [("t^2*a", 2), ("T*b*T", -2), ("t*a*T*b", 0)]:
        e = parse_hnn(text, action)
        assert dilation_factor_empirical(e, action, samples=300, seed=9) == expected
        assert expected == e.tpos - e.tneg


def test_dilation_sample_guard():
    action = cat.get("basilica").action()
    with pytest.raises(ValueError):
        dilation_factor_empirical(parse_hnn("t", action), action, samples=1)


def test_ultrametric_inequality():
    rng = random.Random(30)
    for _ in range(300):
        pts = [BoundaryPoint(rng.randint(-5, 1),
                             tuple(rng.randrange(2) for _ in range(10)))
               for _ in range(3)]
        x, y, z = pts
        lxy, lyz, lxz = (boundary_distance(x, y), boundary_distance(y, z),
                         boundary_distance(x, z))
        if None in (lxy, lyz, lxz):
            continue
        # d(x,z) <= max(d(x,y), d(y,z)) means l(x,z) >= min(l(x,y), l(y,z))
        assert lxz >= min(lxy, lyz)


def test_vertex_label_consistency():
    action = cat.get("basilica").action()
    v = UnrootedVertex(2, (1, 0, 1))
    label = vertex_label(v, action, window=6)
    assert label.offset == -1
    assert label.digits[:3] == (1, 0, 1)
    assert label.digits[3:] == (0,) * 6
