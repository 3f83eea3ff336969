"""Fourier-multiplier backend: eigenfunction exactness, operator identities,
and the algebra tying the two-field operators to Riesz transforms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracfield.core import FieldSpec, GridField, inner_product, lp_norm, make_grid, sample
from fracfield.ops_spectral import (
    H_alpha,
    Multiplier,
    frac_divergence_spec,
    frac_gradient_spec,
    frac_laplacian_spec,
    gradient_multipliers,
    laplacian_multiplier,
    nl_divergence_spec,
    nl_gradient_spec,
    riesz,
    riesz_commutator,
    riesz_multipliers,
)


def grid1(N=64):
    return make_grid(1, (0.0,), (2.0,), N)


def grid2(N=32):
    return make_grid(2, (0.0, 0.0), (2.0, 2.0), N)


def smooth_pair(grid, seeds=(3, 7)):
    f = sample(FieldSpec.random_smooth(seed=seeds[0]), grid)
    g = sample(FieldSpec.random_smooth(seed=seeds[1]), grid)
    return f, g


def rel(a, b):
    return lp_norm(a - b, 2) / max(lp_norm(b, 2), 1e-300)


# =============================================================================
# multipliers
# =============================================================================


class TestMultipliers:
    def test_laplacian_symbol_values(self):
        g = grid1(16)
        m = laplacian_multiplier(g, 0.5)
        # DC component is annihilated; mode k carries (2 pi k / L)^s
        assert m.symbol.flat[0] == 0.0
        assert math.isclose(m.symbol[3], (2.0 * math.pi * 3 / 2.0) ** 0.5, rel_tol=1e-14)

    def test_order_range_enforced(self):
        g = grid1(16)
        for s in (0.0, 2.0, -0.3, 2.5):
            with pytest.raises(ValueError):
                laplacian_multiplier(g, s)
        for a in (0.0, 1.0, -0.1, 1.7):
            with pytest.raises(ValueError):
                gradient_multipliers(g, a)

    def test_laplacian_order_up_to_two(self):
        # the family is defined for any order in (0, 2), not just (0, 1)
        g = grid1(16)
        m = laplacian_multiplier(g, 1.4)
        assert math.isclose(m.symbol[1], (2.0 * math.pi / 2.0) ** 1.4, rel_tol=1e-14)

    def test_odd_symbols_vanish_at_nyquist(self):
        g = grid1(16)
        (mg,) = gradient_multipliers(g, 0.5)
        assert mg.symbol[8] == 0.0  # k = N/2
        (mr,) = riesz_multipliers(g)
        assert mr.symbol[8] == 0.0

    def test_even_symbol_keeps_nyquist(self):
        g = grid1(16)
        m = laplacian_multiplier(g, 0.5)
        assert m.symbol[8] > 0.0

    def test_apply_validates(self):
        g, other = grid1(16), grid1(32)
        m = laplacian_multiplier(g, 0.5)
        with pytest.raises(ValueError):
            m.apply(sample(FieldSpec.constant(1.0), other))
        vec = GridField.vector(grid2(16), np.zeros((2, 16, 16)))
        with pytest.raises(ValueError):
            laplacian_multiplier(grid2(16), 0.5).apply(vec)

    def test_multiplier_frozen(self):
        m = laplacian_multiplier(grid1(16), 0.5)
        with pytest.raises(AttributeError):
            m.grid = grid1(32)


# =============================================================================
# eigenfunctions: plane waves
# =============================================================================


class TestEigenfunctions:
    @pytest.mark.parametrize("k,alpha", [(1, 0.5), (3, 0.3), (5, 0.7)])
    def test_laplacian_plane_wave_1d(self, k, alpha):
        g = grid1(64)
        f = sample(FieldSpec.plane_wave(k=(k,), phase=0.4), g)
        lam = (2.0 * math.pi * k / 2.0) ** alpha
        out = frac_laplacian_spec(f, alpha)
        assert float(np.max(np.abs(out.values - lam * f.values))) <= 1e-12 * lam

    def test_laplacian_plane_wave_2d(self):
        g = grid2(32)
        f = sample(FieldSpec.plane_wave(k=(2, 3), phase=-0.2), g)
        lam = (2.0 * math.pi * math.hypot(2, 3) / 2.0) ** 0.5
        out = frac_laplacian_spec(f, 0.5)
        assert float(np.max(np.abs(out.values - lam * f.values))) <= 1e-12 * lam

    def test_gradient_plane_wave(self):
        # grad_j cos(w.x + p) = -w_j |w|^(alpha-1) sin(w.x + p)
        g = grid1(64)
        x = g.axes()[0]
        k, alpha, phase = 3, 0.5, 0.7
        w = 2.0 * math.pi * k / 2.0
        f = sample(FieldSpec.plane_wave(k=(k,), phase=phase), g)
        out = frac_gradient_spec(f, alpha)
        expect = -w * abs(w) ** (alpha - 1.0) * np.sin(w * x + phase)
        assert float(np.max(np.abs(out.component(0).values - expect))) <= 1e-12 * abs(w) ** alpha

    def test_riesz_plane_wave(self):
        # R_j cos(w.x + p) = -(w_j / |w|) sin(w.x + p)
        g = grid2(32)
        X = g.meshgrid()
        kv, phase = (1, 2), 0.1
        w = [2.0 * math.pi * kk / 2.0 for kk in kv]
        mag = math.hypot(*w)
        f = sample(FieldSpec.plane_wave(k=kv, phase=phase), g)
        out = riesz(f)
        theta = w[0] * X[0] + w[1] * X[1] + phase
        for j in range(2):
            expect = -(w[j] / mag) * np.sin(theta)
            assert float(np.max(np.abs(out.component(j).values - expect))) <= 1e-13

    def test_nyquist_mode_killed_by_odd_ops(self):
        g = grid1(16)
        f = sample(FieldSpec.plane_wave(k=(8,)), g)  # k = N/2
        assert float(np.max(np.abs(frac_gradient_spec(f, 0.5).data))) == 0.0
        assert float(np.max(np.abs(riesz(f).data))) == 0.0

    def test_nyquist_mode_kept_by_laplacian(self):
        g = grid1(16)
        f = sample(FieldSpec.plane_wave(k=(8,)), g)
        lam = (2.0 * math.pi * 8 / 2.0) ** 0.5
        out = frac_laplacian_spec(f, 0.5)
        assert float(np.max(np.abs(out.values - lam * f.values))) <= 1e-12 * lam

    @settings(max_examples=40, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=7),
        alpha=st.floats(min_value=0.05, max_value=0.95),
        phase=st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_eigenvalue_property(self, k, alpha, phase):
        g = grid1(16)
        f = sample(FieldSpec.plane_wave(k=(k,), phase=phase), g)
        lam = (2.0 * math.pi * k / 2.0) ** alpha
        out = frac_laplacian_spec(f, alpha)
        assert float(np.max(np.abs(out.values - lam * f.values))) <= 1e-11 * lam


# =============================================================================
# operator identities
# =============================================================================


class TestIdentities:
    @pytest.mark.parametrize("dim", [1, 2])
    def test_adjointness(self, dim):
        # <grad f, phi> = -<f, div phi>, exact because the symbols are shared
        g = grid1() if dim == 1 else grid2()
        f, h = smooth_pair(g)
        comps = [h.values] if dim == 1 else [h.values, (f * h).values]
        phi = GridField.vector(g, np.stack(comps))
        lhs = inner_product(frac_gradient_spec(f, 0.5), phi)
        rhs = -inner_product(f, frac_divergence_spec(phi, 0.5))
        assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), 1.0)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_composition_halves_add(self, alpha):
        # -div^a grad^a f = ((-Lap)^(a))^2-style order doubling
        g = grid2()
        f, _ = smooth_pair(g)
        lhs = frac_divergence_spec(frac_gradient_spec(f, alpha), alpha)
        rhs = frac_laplacian_spec(f, 2.0 * alpha)
        assert rel(GridField.scalar(g, -lhs.values), rhs) <= 1e-12

    def test_riesz_squares_to_minus_identity(self):
        g = grid2()
        f, _ = smooth_pair(g)
        R = riesz(f)
        acc = np.zeros(g.shape)
        for j in range(2):
            acc += riesz(R.component(j)).component(j).values
        centered = f.values - np.mean(f.values)
        assert float(np.max(np.abs(acc + centered))) <= 1e-13 * max(np.max(np.abs(centered)), 1.0)

    def test_riesz_intertwines(self):
        # grad^a f = R((-Lap)^(a/2) f) componentwise
        g = grid2()
        f, _ = smooth_pair(g)
        lhs = frac_gradient_spec(f, 0.6)
        rhs = riesz(frac_laplacian_spec(f, 0.6))
        assert rel(lhs, rhs) <= 1e-12

    def test_outputs_have_zero_mean(self):
        g = grid1()
        f, _ = smooth_pair(g)
        assert abs(float(np.mean(frac_laplacian_spec(f, 0.5).values))) <= 1e-15
        assert abs(float(np.mean(frac_gradient_spec(f, 0.5).data))) <= 1e-15

    def test_constants_are_annihilated(self):
        g = grid1()
        f, _ = smooth_pair(g)
        shifted = f + sample(FieldSpec.constant(4.2), g)
        assert rel(frac_laplacian_spec(shifted, 0.5), frac_laplacian_spec(f, 0.5)) <= 1e-13
        c = sample(FieldSpec.constant(3.0), g)
        assert float(np.max(np.abs(frac_laplacian_spec(c, 0.5).values))) <= 1e-14


# =============================================================================
# two-field operators and the Riesz decomposition
# =============================================================================


class TestTwoField:
    def test_nl_gradient_is_leibniz_defect(self):
        g = grid2()
        f, h = smooth_pair(g)
        lhs = nl_gradient_spec(f, h, 0.5)
        rhs = (
            frac_gradient_spec(f * h, 0.5)
            - GridField(g, f.values[None] * frac_gradient_spec(h, 0.5).data)
            - GridField(g, h.values[None] * frac_gradient_spec(f, 0.5).data)
        )
        assert rel(lhs, rhs) <= 1e-14

    def test_nl_gradient_symmetric(self):
        g = grid2()
        f, h = smooth_pair(g)
        a, b = nl_gradient_spec(f, h, 0.5), nl_gradient_spec(h, f, 0.5)
        assert float(np.max(np.abs(a.data - b.data))) <= 1e-14 * float(np.max(np.abs(a.data)))

    def test_nl_duality(self):
        # <phi, nl_grad(f, g)> = <g, nl_div(f, phi)>
        g = grid2()
        f, h = smooth_pair(g)
        w = sample(FieldSpec.random_smooth(seed=11), g)
        phi = GridField.vector(g, np.stack([w.values, (f * w).values]))
        lhs = inner_product(nl_gradient_spec(f, h, 0.5), phi)
        rhs = inner_product(h, nl_divergence_spec(f, phi, 0.5))
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_H_alpha_definition_and_symmetry(self):
        g = grid1()
        f, h = smooth_pair(g)
        H = H_alpha(f, h, 0.5)
        manual = (
            frac_laplacian_spec(f * h, 0.5)
            - f * frac_laplacian_spec(h, 0.5)
            - h * frac_laplacian_spec(f, 0.5)
        )
        assert rel(H, manual) <= 1e-14
        assert rel(H, H_alpha(h, f, 0.5)) <= 1e-13

    def test_H_alpha_vanishes_on_constants(self):
        g = grid1()
        f, _ = smooth_pair(g)
        c = sample(FieldSpec.constant(2.5), g)
        assert float(np.max(np.abs(H_alpha(f, c, 0.5).values))) <= 1e-13

    def test_commutator_definition(self):
        g = grid1()
        f, h = smooth_pair(g)
        C = riesz_commutator(f, h)
        manual = riesz(f * h) - GridField(g, f.values[None] * riesz(h).data)
        assert rel(C, manual) <= 1e-14

    @pytest.mark.parametrize("dim", [1, 2])
    def test_riesz_decomposition(self, dim):
        # nl_grad(f, g) = R(H(f, g)) + [R, f](Lap g) + [R, g](Lap f)
        g = grid1() if dim == 1 else grid2()
        f, h = smooth_pair(g)
        alpha = 0.5
        lhs = nl_gradient_spec(f, h, alpha)
        rhs = (
            riesz(H_alpha(f, h, alpha))
            + riesz_commutator(f, frac_laplacian_spec(h, alpha))
            + riesz_commutator(h, frac_laplacian_spec(f, alpha))
        )
        assert rel(lhs, rhs) <= 1e-12

    def test_validation(self):
        g = grid2()
        f, h = smooth_pair(g)
        other = sample(FieldSpec.random_smooth(seed=1), grid2(16))
        with pytest.raises(ValueError):
            nl_gradient_spec(f, other, 0.5)
        with pytest.raises(ValueError):
            nl_divergence_spec(f, h, 0.5)  # second argument must be a vector
        vec = GridField.vector(g, np.zeros((2, 32, 32)))
        with pytest.raises(ValueError):
            frac_gradient_spec(vec, 0.5)  # gradient wants a scalar
