from fractions import Fraction

from hypothesis import strategies as st

from cantorlab.numeric import Digit


@st.composite
def lambdas(draw, max_den=60):
    q = draw(st.integers(2, max_den))
    p = draw(st.integers(1, q - 1))
    return Fraction(p, q)


@st.composite
def rationals(draw, lo=-2, hi=2, max_den=30):
    q = draw(st.integers(1, max_den))
    p = draw(st.integers(lo * q, hi * q))
    return Fraction(p, q)


def digit_words(max_size=6, min_size=0):
    return st.lists(st.sampled_from(list(Digit)), min_size=min_size, max_size=max_size).map(tuple)
