"""The punctured boundary as digit streams and its exact ultrametric.

A boundary point is a bi-infinite digit string ...x-1 x0 . x1 x2 ... with
the dot between positions 0 and 1; positions far to the left follow the
spine (the distinguished letter, 0 in the p-adic picture).  We store a
finite window: `digits[k]` is the digit at position offset+k, positions
below the offset are implicitly the padding letter, positions past the
window are unknown.  All metric statements are exponent-exact; there is
no floating point anywhere, and "equal to precision" is a distinct
outcome, never silently distance zero.

The p-adic value of a label gives the digit at position i the weight
p^(i-1), which makes the spine 0, the uniformizer label ".010..." the
element p, and the identification an isometry onto Q_p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .hnn import canonicalize


class PrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryPoint:
    """A truncated boundary label: digits at positions offset..offset+len-1."""

    offset: int
    digits: tuple
    size: int = 2
    pad: int = 0

    def __post_init__(self):
        if not 0 <= self.pad < self.size:
            raise ValueError("padding letter outside the alphabet")
        if any(not 0 <= x < self.size for x in self.digits):
            raise ValueError("digit outside the alphabet")

    @property
    def end(self):
        """Largest known position."""
        return self.offset + len(self.digits) - 1

    def digit(self, i):
        """Digit at position i; positions below the window are padding."""
        if i < self.offset:
            return self.pad
        if i > self.end:
            raise PrecisionError(f"position {i} is beyond the stored range")
        return self.digits[i - self.offset]

    def with_offset(self, offset):
        """Same point, window extended to the left with padding."""
        if offset > self.offset:
            raise ValueError("can only extend to the left")
        return BoundaryPoint(offset, (self.pad,) * (self.offset - offset) + self.digits,
                             self.size, self.pad)

    def __str__(self):
        digits = self.digits
        offset = self.offset
        while digits and offset <= 0 and digits[0] == self.pad:
            digits = digits[1:]
            offset += 1
        if offset > 1:
            digits = (self.pad,) * (offset - 1) + digits
            offset = 1
        head = "".join(map(str, digits[:max(0, 1 - offset)]))
        tail = "".join(map(str, digits[max(0, 1 - offset):]))
        return f"{head}.{tail}"


def parse_point(text, size=2, pad=0):
    """Point from an abbreviated label such as ".010" or "1.101"."""
    text = text.strip().replace("…", "")
    if text.endswith("..."):
        text = text[:-3]
    if text.count(".") != 1:
        raise ValueError(f"need exactly one dot in {text!r}")
    head, _, tail = text.partition(".")
    digits = tuple(int(c) for c in head + tail)
    offset = 1 - len(head)
    return BoundaryPoint(offset, digits, size, pad)


def boundary_distance(x, y):
    """Smallest position where the points disagree, or None ("equal to
    precision": all comparable digits agree).  The distance is d^(-l+1)."""
    if x.size != y.size:
        raise ValueError("points live over different alphabets")
    if x.pad != y.pad:
        raise ValueError("points follow different spines; no common puncture")
    lo = min(x.offset, y.offset)
    hi = min(x.end, y.end)
    for i in range(lo, hi + 1):
        if x.digit(i) != y.digit(i):
            return i
    return None


def distance_value(x, y):
    """The ultrametric d^(-l+1) as an exact rational; None if equal to precision."""
    l = boundary_distance(x, y)
    if l is None:
        return None
    return Fraction(x.size) ** (-l + 1)


def phi_value(x, p=None):
    """Exact rational value of the label: digit at position i weighs p^(i-1).

    Defined for points padded with the letter 0 (the p-adic picture); the
    construction is d-adic, so p defaults to the alphabet size and need
    not be prime.
    """
    if x.pad != 0:
        raise ValueError("phi needs 0-padding; this point follows a different spine")
    if p is None:
        p = x.size
    total = Fraction(0)
    for k, digit in enumerate(x.digits):
        i = x.offset + k
        total += digit * Fraction(p) ** (i - 1)
    return total


def padic_valuation(q, p):
    """v_p of a nonzero rational, exactly."""
    if q == 0:
        raise ValueError("the valuation of 0 is infinite")
    num, den = q.numerator, q.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def boundary_apply(e, x, action):
    """theta(e) on a boundary point; digit windows shift losslessly.

    theta(t) moves the dot right (digit indices drop by one); theta(g)
    rewrites the digits below the spine through the appropriate
    sigma^m(g) section.  The output window has the same length.
    """
    if x.pad != action.letter:
        raise ValueError("point's padding letter does not match the action's spine")
    # t^-m first (dot left, indices up), then theta(g), then t^n (dot right)
    x = BoundaryPoint(x.offset + e.tneg, x.digits, x.size, x.pad)
    m = max(0, 1 - x.offset)
    x = x.with_offset(1 - m)
    x = BoundaryPoint(x.offset, action.act_sigma(e.word, m, x.digits), x.size, x.pad)
    return BoundaryPoint(x.offset - e.tpos, x.digits, x.size, x.pad)


class DilationMismatch(RuntimeError):
    """Sampled distance ratios disagree: an implementation fault, not a
    property of the groups."""


def dilation_factor_empirical(e, action, samples=1000, seed=0, margin=4, tail=4):
    """Exponent m with dist(e x, e y) = d^m dist(x, y), from sampled pairs.

    Pairs are generated (seeded) to disagree at a known position; the
    window extends `margin` digits left of the branch (covering the
    t-shifts of e) and `tail` digits past it.  Branch positions stay in a
    small band around the dot: the exponent is position-invariant, while
    acting far below the spine costs sigma-powers of that depth.  The
    exponent must be constant across samples; for elements of theta(G) it
    is 0, for t it is the net displacement.
    """
    import random
    if samples < 2:
        raise ValueError("need at least 2 sample pairs")
    margin = max(margin, e.tneg + e.tpos + 1)
    rng = random.Random(seed)
    d = action.automaton.size
    pad = action.letter
    exponents = set()
    for _ in range(samples):
        branch = rng.randint(-2, 6)
        offset = branch - margin
        common = [rng.randrange(d) for _ in range(margin)]
        a_digit = rng.randrange(d)
        b_digit = (a_digit + rng.randrange(1, d)) % d
        rest_a = [rng.randrange(d) for _ in range(tail)]
        rest_b = [rng.randrange(d) for _ in range(tail)]
        x = BoundaryPoint(offset, tuple(common) + (a_digit,) + tuple(rest_a), d, pad)
        y = BoundaryPoint(offset, tuple(common) + (b_digit,) + tuple(rest_b), d, pad)
        before = boundary_distance(x, y)
        after = boundary_distance(boundary_apply(e, x, action), boundary_apply(e, y, action))
        if before is None or after is None:
            raise PrecisionError("sample pair lost its disagreement; widen the window")
        exponents.add(before - after)
        if len(exponents) > 1:
            raise DilationMismatch(f"inconsistent dilation exponents {sorted(exponents)}")
    return exponents.pop()


def vertex_label(v, action, window=8):
    """Boundary label of the geodesic through a vertex, padded with the spine.

    The word of (m, w) occupies positions -m+1 .. len(w)-m; the label is
    completed downward with the spine letter up to the window size.
    """
    v = canonicalize(v, action.letter)
    pad = action.letter
    digits = v.word + (pad,) * window
    return BoundaryPoint(1 - v.copy, digits, action.automaton.size, pad)
