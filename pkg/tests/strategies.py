"""Hypothesis strategies for exact scalars, matrices and shapes."""

from fractions import Fraction

from hypothesis import strategies as st

from isotropy.exact import ExactMatrix, GaussianRational
from isotropy.shapes import ShapeSpec

small_fraction = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))


@st.composite
def gaussian_rationals(draw, complex_ok=True):
    re = draw(small_fraction)
    im = draw(small_fraction) if complex_ok and draw(st.booleans()) else 0
    return GaussianRational(re, im)


@st.composite
def matrices(draw, rows, cols=None, complex_ok=True):
    cols = rows if cols is None else cols
    return ExactMatrix([[draw(gaussian_rationals(complex_ok)) for _ in range(cols)] for _ in range(rows)])


@st.composite
def parity_matrices(draw, size, sign, complex_ok=True):
    """``M`` with ``M^T = sign * M``."""
    M = draw(matrices(size, complex_ok=complex_ok))
    return M + M.T if sign == 1 else M - M.T


@st.composite
def alphas(draw, max_alpha=5, max_len=3):
    values = draw(st.sets(st.integers(1, max_alpha), min_size=1, max_size=max_len))
    return tuple(sorted(values, reverse=True))


@st.composite
def nilpotent_specs(draw, max_n=12):
    c = draw(st.sampled_from((1, 2)))
    alpha = draw(alphas(max_alpha=4))
    m = tuple(draw(st.integers(1, 2)) for _ in alpha)
    spec = ShapeSpec(c, alpha, m, epsilon=draw(st.sampled_from((1, -1))))
    if spec.n > max_n:
        alpha, m = alpha[:1], (1,)
        spec = ShapeSpec(c, alpha, m, epsilon=spec.epsilon)
    return spec


@st.composite
def nonzero_specs(draw, max_n=12):
    c = draw(st.sampled_from((1, 2)))
    alpha = draw(alphas(max_alpha=3))
    m = tuple(draw(st.integers(1, 2)) for _ in alpha)
    lam = draw(gaussian_rationals().filter(bool))
    spec = ShapeSpec(c, alpha, m, lam=lam)
    if spec.n > max_n:
        spec = ShapeSpec(c, alpha[:1], (1,), lam=lam)
    return spec
