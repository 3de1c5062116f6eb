import numpy as np
import pytest

from itolift import (
    ConfigurationError,
    LiftedField,
    OperatorMatrix,
    SemigroupSpec,
    ShapeError,
    ShearMap,
    TrigPolynomial,
    auxiliary_commutator,
    builtin_symbol,
    compose_l,
    conjugate_by_shear,
    default_fiber_period,
    duhamel_residual,
    fiber_block,
    graph_trace,
    ito_residual,
    ito_transform,
    lift_vector_field,
    make_grid,
    shear_apply,
    shear_matrix,
    tensor_base,
    vector_field_defect,
)

from conftest import random_complex

PI = np.pi

ELLIPTIC = [
    ("bessel", {"m": 1}),
    ("bessel", {"m": 2}),
    ("variable_bessel", {"m": 2, "beta0": 2, "beta1": 1}),
    ("derivative", {}),
]


def random_pair(rng, base, fiber_n):
    fp = TrigPolynomial.random(rng, 2, base.period, 0.3)
    f = ShearMap.from_function(fp, base, fiber_n)
    px = TrigPolynomial.random(rng, 2, base.period)
    py = TrigPolynomial.random(rng, 2, f.fiber_grid.period)
    return f, LiftedField.separable(px, py, base, f.fiber_grid)


def sine_shear(base, M, amp=1.0):
    return ShearMap.from_function(lambda x: amp * np.sin(2 * PI * x / base.period), base, M)


def test_default_fiber_period():
    assert default_fiber_period(np.zeros(4)) == 1.0
    assert default_fiber_period([0.1, -0.5, 0.2]) == 2.0


def test_shear_zero_is_identity(rng):
    base, fib = make_grid(8, 1.0), make_grid(4, 1.0)
    v = LiftedField(random_complex(rng, 8, 4), base, fib)
    out = shear_apply(v, ShearMap(np.zeros(8), fib), 1)
    np.testing.assert_allclose(out.values, v.values, atol=1e-14)


def test_shear_y_independent(rng):
    base, fib = make_grid(8, 1.0), make_grid(6, 2.0)
    v = LiftedField(np.outer(random_complex(rng, 8), np.ones(6)), base, fib)
    f = ShearMap(rng.standard_normal(8), fib)
    np.testing.assert_allclose(shear_apply(v, f, -1).values, v.values, atol=1e-13)


def test_shear_single_mode():
    base = make_grid(8, 1.0)
    f = sine_shear(base, 8, 0.4)
    Y = f.fiber_grid.period
    v = LiftedField.from_function(lambda x, y: np.exp(2j * PI * y / Y), base, f.fiber_grid)
    expected = np.exp(2j * PI * (f.fiber_grid.nodes[None, :] + f.f_values[:, None]) / Y)
    np.testing.assert_allclose(shear_apply(v, f, 1).values, expected, atol=1e-13)


def test_shear_inverse_and_isometry(rng):
    base = make_grid(16, 1.0)
    f, v = random_pair(rng, base, 8)
    w = LiftedField(random_complex(rng, 16, 8), base, f.fiber_grid)
    for field in (v, w):
        there = shear_apply(field, f, 1)
        back = shear_apply(there, f, -1)
        np.testing.assert_allclose(back.values, field.values, atol=1e-12)
        assert there.norm() == pytest.approx(field.norm(), rel=1e-12)


def test_shear_matrix_unitary_random():
    rng = np.random.default_rng(3)
    base = make_grid(16, 1.0)
    for _ in range(20):
        f, _ = random_pair(rng, base, 8)
        S = shear_matrix(f, base, 1).entries
        NM = S.shape[0]
        assert np.linalg.norm(S.conj().T @ S - np.eye(NM)) <= 1e-12 * NM
        Sm = shear_matrix(f, base, -1).entries
        assert np.linalg.norm(Sm - S.conj().T) <= 1e-12 * NM


def test_shear_matrix_matches_apply(rng):
    base = make_grid(8, 1.0)
    f, v = random_pair(rng, base, 4)
    S = shear_matrix(f, base, 1)
    np.testing.assert_allclose(S.apply(v.flat), shear_apply(v, f, 1).flat, atol=1e-13)


def test_shear_rejects_mismatch(rng):
    base = make_grid(8, 1.0)
    v = LiftedField(np.zeros((8, 4)), base, make_grid(4, 1.0))
    with pytest.raises(ShapeError):
        shear_apply(v, ShearMap(np.zeros(8), make_grid(4, 2.0)))
    with pytest.raises(ShapeError):
        shear_apply(v, ShearMap(np.zeros(6), make_grid(4, 1.0)))
    with pytest.raises(ConfigurationError):
        shear_apply(v, ShearMap(np.zeros(8), make_grid(4, 1.0)), 2)


def test_graph_trace_at_node(rng):
    base, fib = make_grid(8, 1.0), make_grid(8, 1.0)
    v = LiftedField(random_complex(rng, 8, 8), base, fib)
    f = ShearMap(np.full(8, fib.nodes[2]), fib)
    np.testing.assert_allclose(graph_trace(v, f).values, v.values[:, 2], atol=1e-12)


def test_graph_trace_y_independent(rng):
    base = make_grid(8, 1.0)
    f = sine_shear(base, 8)
    px = random_complex(rng, 8)
    v = LiftedField(np.outer(px, np.ones(8)), base, f.fiber_grid)
    np.testing.assert_allclose(graph_trace(v, f).values, px, atol=1e-13)


def test_graph_trace_single_mode():
    base = make_grid(16, 1.0)
    f = sine_shear(base, 8, 0.7)
    Y = f.fiber_grid.period
    v = LiftedField.from_function(lambda x, y: np.exp(2j * PI * y / Y), base, f.fiber_grid)
    np.testing.assert_allclose(graph_trace(v, f).values, np.exp(2j * PI * f.f_values / Y), atol=1e-13)


def test_graph_trace_is_shear_then_zero_fiber():
    # v(x, f(x)) = (S_f v)(x, 0)
    rng = np.random.default_rng(11)
    base = make_grid(16, 1.0)
    f, v = random_pair(rng, base, 8)
    np.testing.assert_allclose(graph_trace(v, f).values, shear_apply(v, f, 1).values[:, 0], atol=1e-12)


def test_ito_transform_zero_shear():
    base = make_grid(8, 1.0)
    L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    L_hat = ito_transform(L, f)
    np.testing.assert_allclose(L_hat.entries, np.kron(L.entries, np.eye(4)), atol=1e-12)
    np.testing.assert_array_equal(L_hat.entries, tensor_base(L, f.fiber_grid).entries)


@pytest.mark.parametrize("name, params", ELLIPTIC)
def test_ito_transform_matches_explicit_conjugation(name, params):
    rng = np.random.default_rng(5)
    base = make_grid(16, 1.0)
    f, _ = random_pair(rng, base, 8)
    L = compose_l(builtin_symbol(name, params), base)
    L_hat = ito_transform(L, f)
    oracle = conjugate_by_shear(tensor_base(L, f.fiber_grid), f)
    assert np.linalg.norm(L_hat.entries - oracle) <= 1e-12 * np.linalg.norm(oracle)


@pytest.mark.parametrize("name, params", ELLIPTIC)
def test_ito_transform_spectrum_and_psd(name, params):
    rng = np.random.default_rng(9)
    base = make_grid(16, 1.0)
    f, _ = random_pair(rng, base, 8)
    L = compose_l(builtin_symbol(name, params), base)
    L_hat = ito_transform(L, f)
    assert L_hat.hermitian
    ev = np.linalg.eigvalsh(L_hat.entries)
    assert ev[0] >= -1e-10 * ev[-1]
    expected = np.repeat(np.linalg.eigvalsh(L.entries), 8)
    assert np.max(np.abs(ev - expected)) <= 1e-9 * ev[-1]
    np.testing.assert_allclose(L_hat.eigvalsh(), L.eigvalsh().repeat(8), atol=1e-12 * ev[-1])


def test_fiber_blocks():
    rng = np.random.default_rng(2)
    base = make_grid(8, 1.0)
    f, _ = random_pair(rng, base, 6)
    L = compose_l(builtin_symbol("variable_bessel", {"m": 1, "beta0": 2, "beta1": 1}), base)
    L_hat = ito_transform(L, f)
    fib = f.fiber_grid
    for e, eta in enumerate(fib.frequencies):
        D = np.diag(np.exp(2j * PI * eta * f.f_values / fib.period))
        expected = D.conj().T @ L.entries @ D
        assert np.max(np.abs(fiber_block(L_hat, e) - expected)) <= 1e-12 * (1 + np.abs(expected).max())


def test_ito_transform_rejects(rng):
    base = make_grid(8, 1.0)
    L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
    with pytest.raises(ShapeError):
        ito_transform(L, ShearMap(np.zeros(6), make_grid(4, 1.0)))
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    with pytest.raises(ShapeError):
        ito_transform(L, f, make_grid(4, 2.0))


def test_ito_residual_time_zero(rng):
    base = make_grid(16, 1.0)
    f, v = random_pair(rng, base, 8)
    rmax, rl2 = ito_residual(builtin_symbol("bessel", {"m": 1}), f, v, 0.0)
    assert rmax <= 1e-13 and rl2 <= 1e-13


def test_ito_residual_zero_shear(rng):
    base, fib = make_grid(16, 1.0), make_grid(8, 1.0)
    v = LiftedField(np.outer(random_complex(rng, 16), np.ones(8)), base, fib)
    rmax, _ = ito_residual(builtin_symbol("bessel", {"m": 1}), ShearMap(np.zeros(16), fib), v, 0.1)
    assert rmax <= 1e-12


def test_ito_residual_bessel_sine():
    base = make_grid(32, 1.0)
    f = sine_shear(base, 16)
    Y = f.fiber_grid.period
    v = LiftedField.from_function(
        lambda x, y: (1 + 0.5 * np.cos(2 * PI * x)) * np.exp(np.cos(2 * PI * y / Y)), base, f.fiber_grid
    )
    rmax, rl2 = ito_residual(builtin_symbol("bessel", {"m": 1}), f, v, 0.1)
    assert rmax <= 1e-9 * max(1.0, np.abs(v.values).max())
    assert rl2 <= rmax


@pytest.mark.parametrize("name, params", ELLIPTIC)
def test_ito_residual_random_pairs(name, params):
    rng = np.random.default_rng(21)
    base = make_grid(16, 1.0)
    a = builtin_symbol(name, params)
    for _ in range(3):
        f, v = random_pair(rng, base, 8)
        for t in (0.0, 0.01, 0.1, 1.0):
            rmax, _ = ito_residual(a, f, v, t)
            assert rmax <= 1e-9 * max(1.0, np.abs(v.values).max())


def test_ito_series_agrees_with_eig():
    rng = np.random.default_rng(4)
    base = make_grid(16, 1.0)
    f, v = random_pair(rng, base, 8)
    a = builtin_symbol("variable_bessel", {"m": 2, "beta0": 2, "beta1": 1})
    for t in (0.01, 0.1, 1.0):
        r_eig = ito_residual(a, f, v, t, "eig")[0]
        r_ser = ito_residual(a, f, v, t, SemigroupSpec(t, "series", 20, base.xi_max))[0]
        assert abs(r_eig - r_ser) <= 1e-8


def test_ito_residual_rejects_negative_time(rng):
    base = make_grid(8, 1.0)
    f, v = random_pair(rng, base, 4)
    with pytest.raises(ConfigurationError):
        ito_residual(builtin_symbol("bessel", {"m": 1}), f, v, -1.0)


def test_lift_vector_field_zero_shear():
    base = make_grid(8, 1.0)
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    c = 1 + 0.5 * np.cos(2 * PI * base.nodes)
    X, X_hat = lift_vector_field(c, f, base)
    np.testing.assert_allclose(X_hat.entries, np.kron(X.entries, np.eye(4)), atol=1e-14)


def test_lift_vector_field_fiber_coefficient():
    base = make_grid(16, 1.0)
    f = sine_shear(base, 8)
    np.testing.assert_allclose(f.derivative(base), 2 * PI * np.cos(2 * PI * base.nodes), atol=1e-12)
    X, X_hat = lift_vector_field(np.ones(16), f, base)
    fib = f.fiber_grid
    # the fiber part acting on y-only fields is (c f') d/dy
    q = np.sin(2 * PI * fib.nodes / fib.period)
    v = np.kron(np.ones(16), q)
    out = X_hat.apply(v).reshape(16, 8)
    dq = 2 * PI / fib.period * np.cos(2 * PI * fib.nodes / fib.period)
    np.testing.assert_allclose(out, np.outer(2 * PI * np.cos(2 * PI * base.nodes), dq), atol=1e-11)


def test_lift_vector_field_chain_rule():
    # X_hat acting on v, traced on the graph, equals X acting on the trace (band-limited, low modes)
    base = make_grid(32, 1.0)
    f = sine_shear(base, 16, 0.25)
    c = 1 + 0.3 * np.sin(2 * PI * base.nodes)
    X, X_hat = lift_vector_field(c, f, base)
    v = LiftedField.from_function(
        lambda x, y: np.cos(2 * PI * x) * np.cos(2 * PI * y / f.fiber_grid.period), base, f.fiber_grid
    )
    w = LiftedField(X_hat.apply(v.flat).reshape(32, 16), base, f.fiber_grid)
    lhs = graph_trace(w, f).values
    rhs = X.apply(graph_trace(v, f).values)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_vector_field_defect_zero_shear():
    base = make_grid(8, 1.0)
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    assert vector_field_defect([1 + 0.5 * np.cos(2 * PI * base.nodes)], f, base) <= 1e-10


def _defect_pair(band):
    out = []
    for N, M in ((16, 8), (32, 16)):
        base = make_grid(N, 1.0)
        f = ShearMap.from_function(lambda x: 0.25 * np.sin(2 * PI * x), base, M, fiber_period=1.0)
        cs = [1 + 0.5 * np.cos(2 * PI * base.nodes), 0.3 * np.sin(2 * PI * base.nodes)]
        out.append(vector_field_defect(cs, f, base, band=band))
    return out


def test_vector_field_defect_band_converges_spectrally():
    coarse, fine = _defect_pair((2, 2))
    assert fine <= 1e-2 * coarse


def test_vector_field_full_defect_is_aliasing_dominated():
    # the unrestricted defect is carried by the highest grid modes and does not shrink
    coarse, fine = _defect_pair(None)
    assert fine > coarse


def test_auxiliary_zero_shear():
    base = make_grid(8, 1.0)
    L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    res = auxiliary_commutator(ito_transform(L, f), 1.0, f, L)
    nrm = np.linalg.norm(ito_transform(L, f).entries)
    np.testing.assert_allclose(res.L_bar.entries, res.L_tilde.entries, atol=1e-12 * nrm)
    assert res.comm_norm <= 1e-12 * nrm


def test_auxiliary_bessel_sine():
    base = make_grid(16, 1.0)
    L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
    f = sine_shear(base, 8)
    L_hat = ito_transform(L, f)
    res = auxiliary_commutator(L_hat, 1.0, f, L)
    nrm = np.linalg.norm(L_hat.entries)
    assert res.comm_norm <= 1e-9 * nrm
    assert res.conj_norm <= 1e-9 * nrm
    assert res.L_bar.hermitian


def test_auxiliary_rejects():
    base = make_grid(8, 1.0)
    L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
    f = ShearMap(np.zeros(8), make_grid(4, 1.0))
    g = ShearMap(np.zeros(8), make_grid(4, 2.0))
    with pytest.raises(ShapeError):
        auxiliary_commutator(ito_transform(L, f), 1.0, g, L)


def _duhamel_setup():
    base = make_grid(16, 1.0)
    f = ShearMap.from_function(lambda x: 0.3 * np.sin(2 * PI * x), base, 8)
    Y = f.fiber_grid.period
    v = LiftedField.from_function(lambda x, y: (1 + np.cos(2 * PI * x)) * np.cos(2 * PI * y / Y), base, f.fiber_grid)
    return base, f, v


def test_duhamel_inactive_and_time_zero():
    base, f, v = _duhamel_setup()
    a = builtin_symbol("bessel", {"m": 1})
    assert duhamel_residual(a, f, v, 0.1, base.xi_max, 8) <= 1e-12
    assert duhamel_residual(a, f, v, 0.0, base.xi_max / 2, 8) == 0.0


def test_duhamel_second_order():
    base, f, v = _duhamel_setup()
    a = builtin_symbol("bessel", {"m": 1})
    lam = base.xi_max / 2
    r8, r16, r32 = (duhamel_residual(a, f, v, 0.01, lam, n) for n in (8, 16, 32))
    assert r8 / r16 >= 3.5
    assert r16 / r32 >= 3.5


def test_duhamel_rejects():
    base, f, v = _duhamel_setup()
    a = builtin_symbol("bessel", {"m": 1})
    with pytest.raises(ConfigurationError):
        duhamel_residual(a, f, v, 0.1, 2.0, 1)
    with pytest.raises(ConfigurationError):
        duhamel_residual(a, f, v, -0.1, 2.0, 8)


def test_lifted_field_shape_check():
    with pytest.raises(ShapeError):
        LiftedField(np.zeros((3, 4)), make_grid(4, 1.0), make_grid(4, 1.0))
    with pytest.raises(ConfigurationError):
        ShearMap(np.array([0.0, np.nan]), make_grid(4, 1.0))


def test_operator_matmul_and_identity(rng):
    g = make_grid(4, 1.0)
    A = OperatorMatrix(random_complex(rng, 4, 4), (g,))
    np.testing.assert_array_equal((A @ OperatorMatrix.identity(g)).entries, A.entries)
