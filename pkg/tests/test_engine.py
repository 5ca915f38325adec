import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from isotropy.commutant import BlockToeplitzMatrix, CommutantShape
from isotropy.engine import (
    AlternatingFormPair,
    FreeParameterSet,
    assemble_mixed,
    build_centralizer,
    build_centralizer_nilpotent,
    build_centralizer_nonzero,
    catalan_coefficient,
    catalan_recursion,
    cayley_automorphism,
    centralizer_dimension,
    dimension_variants,
    generator_diagonal_unipotent,
    generator_offdiagonal,
    random_automorphism,
    random_matrix,
    random_nonsingular,
    random_parity_matrix,
    real_admissibility,
    reflection,
    root_series_coefficient,
    signature,
    solve_structured_congruence,
)
from isotropy.errors import DomainError
from isotropy.exact import ExactMatrix, gq
from isotropy.normal_forms import base_form, bundle_for
from isotropy.oracle import commutes, is_H_automorphism, lie_algebra_dimension
from isotropy.shapes import ShapeSpec
from isotropy.structured import direct_sum
from strategies import nilpotent_specs, nonzero_specs

I1, I2 = ExactMatrix.identity(1), ExactMatrix.identity(2)
SYMP = ExactMatrix([[0, 1], [-1, 0]])


def model_forms(spec):
    return build_centralizer_nilpotent(spec).forms


# -- forms and parameters ----------------------------------------------------

def test_form_parity_enforced():
    with pytest.raises(DomainError):
        AlternatingFormPair(1, (2,), (2,), [[I2]])  # alpha=2, c=1 needs a skew B_0
    with pytest.raises(DomainError):
        AlternatingFormPair(2, (1,), (2,), [[ExactMatrix.zeros(2)]])
    forms = AlternatingFormPair(2, (1,), (2,), [[SYMP]])
    assert forms.dense_B() == SYMP


def test_free_parameters_validated():
    forms = AlternatingFormPair.block_diagonal(1, (3,), [I2])
    with pytest.raises(DomainError):
        FreeParameterSet(base=(ExactMatrix([[2, 0], [0, 1]]),)).validate(forms)
    with pytest.raises(DomainError):  # Z_1 for alpha=3, c=1 must be symmetric
        FreeParameterSet(base=(I2,), Z={(0, 1): SYMP}).validate(forms)
    FreeParameterSet(base=(I2,), Z={(0, 1): I2, (0, 2): SYMP}).validate(forms)


def test_free_parameter_json_round_trip():
    rng = random.Random(2)
    model = build_centralizer_nilpotent(ShapeSpec(1, (3, 1), (1, 2)))
    params = model.random_parameters(rng)
    again = FreeParameterSet.from_json(params.to_json())
    assert solve_structured_congruence(model.forms, again) == solve_structured_congruence(model.forms, params)


def test_scalar_case_gives_plus_minus_one():
    forms = AlternatingFormPair.block_diagonal(1, (1,), [I1])
    for s in (1, -1):
        X = solve_structured_congruence(forms, FreeParameterSet(base=(ExactMatrix([[s]]),)))
        assert X.dense == ExactMatrix([[s]])


@given(nilpotent_specs(), st.integers(0, 2 ** 32))
def test_solver_residual_is_zero(spec, seed):
    model = build_centralizer_nilpotent(spec)
    params = model.random_parameters(random.Random(seed))
    X, state = solve_structured_congruence(model.forms, params, return_state=True)
    assert model.forms.residual(X).is_zero()
    assert state.symmetry_violations() == []
    assert X.diagonal_nonsingular


def test_solver_shape_3_1():
    spec = ShapeSpec(2, (3, 1), (1, 2))
    model = build_centralizer_nilpotent(spec)
    X = solve_structured_congruence(model.forms, model.random_parameters(random.Random(9)))
    assert model.forms.residual(X).is_zero()


def random_forms(rng, c, alpha, size=2):
    seqs = []
    for a in alpha:
        seq = []
        for j in range(a):
            sign = (-1) ** (a - j + c)
            M = random_parity_matrix(rng, size, sign)
            if j == 0:
                M = M + (I2 * 3 if sign == 1 else SYMP * 3)
            seq.append(M)
        seqs.append(seq)
    return seqs


@pytest.mark.parametrize("c", [1, 2])
@pytest.mark.parametrize("alpha", [(2,), (3, 1), (4, 2), (3, 2, 1)])
def test_solver_general_forms(c, alpha):
    rng = random.Random(sum(alpha) + 10 * c)
    mu = (2,) * len(alpha)
    while True:
        B = random_forms(rng, c, alpha)
        try:
            base = AlternatingFormPair(c, alpha, mu, B)
        except DomainError:  # singular B_0, draw again
            continue
        break
    shape = base.shape
    # a block-diagonal Y keeps C := F Y^T F B Y block diagonal
    coeffs = {}
    for r in range(shape.N):
        for s in range(shape.N):
            blocks = [random_matrix(rng, 2, 2) if r == s else ExactMatrix.zeros(2) for _ in range(shape.b(r, s))]
            if r == s:
                blocks[0] = random_nonsingular(rng, 2)
            coeffs[(r, s)] = tuple(blocks)
    Y = BlockToeplitzMatrix(shape, coeffs)
    Cd = base.dense_F() @ Y.dense.T @ base.dense_F() @ base.dense_B() @ Y.dense
    C = []
    for r in range(shape.N):
        off = sum(shape.alpha[k] * shape.mu[k] for k in range(r))
        C.append([Cd.submatrix(off, off + 2, off + 2 * j, off + 2 * j + 2) for j in range(shape.alpha[r])])
    forms = AlternatingFormPair(c, alpha, mu, B, C)
    assert forms.residual(Y).is_zero()
    assert forms.dense_C() == Cd
    params = FreeParameterSet(
        base=tuple(Y.coefficient(r, r, 0) for r in range(shape.N)),
        below={(r, s): tuple(random_matrix(rng, 2, 2) for _ in range(shape.b(r, s)))
               for r in range(shape.N) for s in range(r)},
    )
    X, state = solve_structured_congruence(forms, params, return_state=True)
    assert forms.residual(X).is_zero()
    assert state.symmetry_violations() == []


def test_solver_records_intermediates():
    model = build_centralizer_nilpotent(ShapeSpec(1, (3, 1), (1, 1)))
    _, state = solve_structured_congruence(model.forms, model.random_parameters(random.Random(0)),
                                           return_state=True)
    for step in state.steps:
        assert step["D"] == step["xi"] + step["Xi"] + step["Lambda"]
    assert {(s["j"], s["r"], s["p"]) for s in state.steps} == {(1, 0, 0), (2, 0, 0), (0, 0, 1)}


@given(nilpotent_specs(max_n=10), st.integers(0, 2 ** 32))
def test_solution_set_is_a_group(spec, seed):
    model = build_centralizer_nilpotent(spec)
    rng = random.Random(seed)
    X = solve_structured_congruence(model.forms, model.random_parameters(rng))
    Y = solve_structured_congruence(model.forms, model.random_parameters(rng))
    assert model.forms.residual(X @ Y).is_zero()
    assert model.forms.residual(X.inverse()).is_zero()


# -- generators ----------------------------------------------------------------

def test_generators_trivial_inputs():
    spec = ShapeSpec(1, (3, 1), (1, 1))
    ident = BlockToeplitzMatrix.identity(CommutantShape(spec.alpha, spec.mu))
    Z = ExactMatrix.zeros(1)
    assert generator_diagonal_unipotent(spec, 0, [Z, Z]) == ident
    assert generator_offdiagonal(spec, 0, 1, 0, Z) == ident


def test_asz_first_step():
    spec = ShapeSpec(1, (2,), (1,))  # paired block, B = standard symplectic 2x2
    B = base_form(spec, 0)
    Z1 = SYMP * 3
    W = generator_diagonal_unipotent(spec, 0, [Z1])
    assert W.coefficient(0, 0, 1) == B.inverse() @ Z1


def test_generator_input_checks():
    spec = ShapeSpec(1, (3, 1), (1, 1))
    with pytest.raises(DomainError):
        generator_diagonal_unipotent(spec, 0, [ExactMatrix([[1]])])
    with pytest.raises(DomainError):
        generator_offdiagonal(spec, 0, 1, 1, ExactMatrix([[1]]))
    with pytest.raises(DomainError):
        generator_offdiagonal(spec, 1, 0, 0, ExactMatrix([[1]]))


@given(nilpotent_specs(), st.integers(0, 2 ** 32))
def test_generators_solve_the_equation(spec, seed):
    model = build_centralizer_nilpotent(spec)
    for g in model.generator_list(random.Random(seed)):
        assert model.forms.residual(g["toeplitz"]).is_zero(), g["kind"]


def test_exxc_pattern_in_generators():
    spec = ShapeSpec(2, (4, 2), (1, 1))
    model = build_centralizer_nilpotent(spec)
    gens = model.generator_list(random.Random(0))
    hit = [g for g in gens if g["kind"] == "offdiagonal-unipotent" and g["k"] == 1]
    assert hit
    Y = hit[0]["toeplitz"]
    assert Y.coefficient(1, 0, 1) == hit[0]["F"]
    assert not Y.coefficient(0, 1, 1).is_zero()


# -- Catalan coefficients ------------------------------------------------------

def test_catalan_examples():
    assert catalan_coefficient(0, "even") == catalan_coefficient(0, "odd") == Fraction(-1, 2)
    assert catalan_coefficient(1, "even") == Fraction(-1, 8)
    assert catalan_coefficient(2, "odd") == 0
    assert catalan_recursion(20, "even") == [catalan_coefficient(n, "even") for n in range(21)]


def test_catalan_odd_recursion_vanishes_on_even_indices():
    seq = catalan_recursion(20, "odd")
    assert all(seq[2 * n] == 0 for n in range(1, 11))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_root_series_squares_to_target(k):
    # f(x) = 1 + sum a_{n-1} x^n, f^2 = 1 - (-1)^k x
    N = 12
    f = [Fraction(1)] + [root_series_coefficient(n - 1, k) for n in range(1, N)]
    sq = [sum(f[i] * f[n - i] for i in range(n + 1)) for n in range(N)]
    assert sq[0] == 1 and sq[1] == -((-1) ** k)
    assert all(v == 0 for v in sq[2:])


# -- base groups and inertia ---------------------------------------------------

def test_cayley_examples():
    assert cayley_automorphism(I2, ExactMatrix.zeros(2)) == I2
    W = SYMP.inverse() @ ExactMatrix([[1, 2], [2, -3]])
    Q = cayley_automorphism(SYMP, W)
    assert is_H_automorphism(Q, SYMP)
    with pytest.raises(DomainError):
        cayley_automorphism(I2, I2)


def test_reflection_reaches_other_component():
    R = reflection(I2, ExactMatrix([[1], [2]]))
    assert is_H_automorphism(R, I2) and R.det() == gq(-1)


@given(st.integers(1, 4), st.sampled_from(("sym", "skew")), st.integers(0, 2 ** 32))
def test_random_automorphism(size, kind, seed):
    if kind == "skew":
        size = 2 * ((size + 1) // 2)
        B = direct_sum(*[SYMP] * (size // 2))
    else:
        B = ExactMatrix.diag([1 + i for i in range(size)])
    Q = random_automorphism(B, random.Random(seed))
    assert is_H_automorphism(Q, B)


def test_both_orthogonal_components_sampled():
    rng = random.Random(4)
    dets = {random_automorphism(I2, rng, complex_ok=False).det() for _ in range(30)}
    assert dets == {gq(1), gq(-1)}


def test_signature_and_admissibility():
    assert signature(ExactMatrix.diag([1, -1, 0])) == (1, 1, 1)
    assert signature(ExactMatrix([[0, 1], [1, 0]])) == (1, 1, 0)
    same = AlternatingFormPair(1, (1,), (2,), [[I2]], [[I2]])
    assert real_admissibility(same)
    mixed = AlternatingFormPair(1, (1,), (2,), [[ExactMatrix.diag([1, -1])]], [[I2]])
    assert not real_admissibility(mixed)
    pos = AlternatingFormPair(1, (1,), (2,), [[ExactMatrix.diag([2, 3])]], [[I2]])
    assert real_admissibility(pos)
    with pytest.raises(DomainError):
        signature(ExactMatrix([[gq(0, 1)]]))


# -- dimensions ----------------------------------------------------------------

def test_dimension_examples():
    assert centralizer_dimension(ShapeSpec(1, (1,), (3,))) == 3
    assert centralizer_dimension(ShapeSpec(2, (1,), (1,))) == 3
    assert centralizer_dimension(ShapeSpec(1, (2,), (1,), lam=gq(1))) == 2


def test_dimension_variants_disagree_where_expected():
    v = dimension_variants(ShapeSpec(2, (1,), (1,)))
    assert v["theorem"] == 3 and v["cdim"] == 1
    v = dimension_variants(ShapeSpec(1, (2, 1), (1, 1), lam=gq(1)))
    assert v["theorem"] == 5 and v["as_printed"] == 7


@given(nilpotent_specs(max_n=10))
def test_free_parameter_count_matches_oracle(spec):
    model = build_centralizer_nilpotent(spec)
    b = bundle_for(spec)
    assert model.forms.free_dimension() == model.dimension == lie_algebra_dimension(b.A, b.H)


# -- models --------------------------------------------------------------------

def test_o1_model():
    model = build_centralizer(ShapeSpec(1, (1,), (1,)))
    values = {Q[0, 0] for Q in model.sample_many(0, 20)}
    assert values == {gq(1), gq(-1)}
    assert model.dimension == 0


def test_sampling_is_deterministic():
    model = build_centralizer(ShapeSpec(1, (2, 1), (1, 1)))
    a = [Q.to_json() for Q in model.sample_many(42, 5)]
    b = [Q.to_json() for Q in build_centralizer(ShapeSpec(1, (2, 1), (1, 1))).sample_many(42, 5)]
    assert a == b
    assert a != [Q.to_json() for Q in model.sample_many(43, 5)]


def test_reductive_and_unipotent_parts():
    spec = ShapeSpec(1, (3, 2), (1, 1))
    model = build_centralizer(spec)
    b = model.bundle
    rng = random.Random(5)
    red = model.reductive_element(rng)
    for r in range(spec.N):
        Qr = red.toeplitz.coefficient(r, r, 0)
        B = model.forms.base(r)
        assert Qr.T @ B @ Qr == B
        assert all(red.toeplitz.coefficient(r, r, j).is_zero() for j in range(1, spec.alpha[r]))
    uni = model.unipotent_element(rng)
    assert uni.toeplitz.diagonal_part() == BlockToeplitzMatrix.identity(model.shape)
    for s in (red, uni):
        assert is_H_automorphism(s.Q, b.H) and commutes(s.Q, b.A) and commutes(s.Q, b.R)


def test_nonzero_identity_maps_to_identity():
    spec = ShapeSpec(2, (2,), (1,), lam=gq(1))
    model = build_centralizer_nonzero(spec)
    assert model.embed(BlockToeplitzMatrix.identity(model.shape)) == ExactMatrix.identity(spec.n)


@given(nonzero_specs(max_n=10), st.integers(0, 2 ** 32))
def test_nonzero_duality_product(spec, seed):
    model = build_centralizer_nonzero(spec)
    rng = random.Random(seed)
    X, Y = model.random_toeplitz(rng), model.random_toeplitz(rng)
    lhs = direct_sum(X.dense, X.dense.inverse().T) @ direct_sum(Y.dense, Y.dense.inverse().T)
    XY = (X @ Y).dense
    assert lhs == direct_sum(XY, XY.inverse().T)
    assert model.embed(X) @ model.embed(Y) == model.embed(X @ Y)


def test_gl1_model():
    model = build_centralizer(ShapeSpec(1, (1,), (1,), lam=gq(1)))
    assert model.dimension == 1
    for Q in model.sample_many(1, 5):
        assert Q[0, 1] == Q[1, 0] == 0 and Q[0, 0] * Q[1, 1] == gq(1)


def test_assemble_mixed_dimensions():
    a = build_centralizer(ShapeSpec(1, (1,), (1,)))
    b = build_centralizer(ShapeSpec(1, (1,), (1,), lam=gq(1)))
    mixed = assemble_mixed([a, b])
    assert mixed.dimension == 1 == lie_algebra_dimension(mixed.bundle.A, mixed.bundle.H)
    assert assemble_mixed([a]) is a
    c = build_centralizer(ShapeSpec(1, (1,), (1,), lam=gq(2)))
    two = assemble_mixed([b, c])
    assert two.dimension == 2 == lie_algebra_dimension(two.bundle.A, two.bundle.H)
    with pytest.raises(DomainError):
        assemble_mixed([b, b])
