import math

import numpy as np
import pytest

from geominimax.errors import (
    ContractError,
    DomainError,
    NoUniqueGeodesicError,
    ParameterError,
    StepTooLongError,
)
from geominimax.manifolds import Euclidean, Product, Spd, Sphere


def make_all():
    return [Euclidean(5, 4.0), Sphere(4, math.pi / 4.0), Spd(3, 4.0)]


def sampling_radius(m):
    return 0.9 * min(m.exp_guard, m.diameter_bound)


class TestEuclidean:
    def setup_method(self):
        self.m = Euclidean(2, 10.0)

    def test_exp_is_addition(self):
        x = self.m.point([1.0, 2.0])
        v = self.m.tangent(x, [0.5, -1.0])
        np.testing.assert_allclose(self.m.exp(x, v).value, [1.5, 1.0])

    def test_log_is_difference(self):
        x = self.m.point([1.0, 2.0])
        y = self.m.point([4.0, 6.0])
        np.testing.assert_allclose(self.m.log(x, y).value, [3.0, 4.0])
        assert self.m.distance(x, y) == 5.0

    def test_transport_keeps_coordinates(self):
        x = self.m.point([0.0, 0.0])
        y = self.m.point([3.0, -1.0])
        v = self.m.tangent(x, [2.0, 7.0])
        moved = self.m.transport(v, y)
        np.testing.assert_allclose(moved.value, v.value)
        assert moved.base == y

    def test_inner_is_dot(self):
        x = self.m.point([0.0, 0.0])
        u = self.m.tangent(x, [1.0, 2.0])
        v = self.m.tangent(x, [3.0, -1.0])
        assert self.m.inner(u, v) == 1.0

    def test_bad_dimension(self):
        with pytest.raises(ParameterError):
            self.m.point([1.0, 2.0, 3.0])
        with pytest.raises(ParameterError):
            Euclidean(0)


class TestSphere:
    def setup_method(self):
        self.m = Sphere(3, math.pi / 4.0)

    def test_quarter_turn(self):
        e1 = self.m.point([1.0, 0.0, 0.0])
        v = self.m.tangent(e1, [0.0, math.pi / 2.0, 0.0])
        out = self.m.exp(e1, v)
        np.testing.assert_allclose(out.value, [0.0, 1.0, 0.0], atol=1e-12)

    def test_log_and_distance_quarter_turn(self):
        e1 = self.m.point([1.0, 0.0, 0.0])
        e2 = self.m.point([0.0, 1.0, 0.0])
        np.testing.assert_allclose(self.m.log(e1, e2).value, [0.0, math.pi / 2.0, 0.0], atol=1e-12)
        assert abs(self.m.distance(e1, e2) - math.pi / 2.0) < 1e-15

    def test_exp_stays_on_sphere(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            x = self.m.random_point(rng)
            v = self.m.random_tangent(x, rng, norm=float(rng.uniform(0.0, 3.0)))
            y = self.m.exp(x, v)
            assert abs(np.linalg.norm(y.value) - 1.0) <= 1e-10

    def test_transport_orthogonal_component_unchanged(self):
        e1 = self.m.point([1.0, 0.0, 0.0])
        e2 = self.m.point([0.0, 1.0, 0.0])
        v = self.m.tangent(e1, [0.0, 0.0, 1.0])
        np.testing.assert_allclose(self.m.transport(v, e2).value, [0.0, 0.0, 1.0], atol=1e-12)

    def test_transport_rotates_in_plane_component(self):
        e1 = self.m.point([1.0, 0.0, 0.0])
        e2 = self.m.point([0.0, 1.0, 0.0])
        v = self.m.tangent(e1, [0.0, 1.0, 0.0])
        # the unit tangent pointing at e2 becomes -e1 after a quarter turn
        np.testing.assert_allclose(self.m.transport(v, e2).value, [-1.0, 0.0, 0.0], atol=1e-12)

    def test_antipodal_log_rejected(self):
        x = self.m.point([1.0, 0.0, 0.0])
        y = self.m.point([-1.0, 0.0, 0.0])
        with pytest.raises(NoUniqueGeodesicError):
            self.m.log(x, y)

    def test_exp_guard(self):
        x = self.m.point([1.0, 0.0, 0.0])
        v = self.m.tangent(x, [0.0, math.pi, 0.0])
        with pytest.raises(StepTooLongError):
            self.m.exp(x, v)

    def test_membership_checked(self):
        with pytest.raises(ParameterError):
            self.m.point([1.0, 1.0, 0.0])
        # mild drift is projected away
        p = self.m.point([1.0 + 5e-9, 0.0, 0.0])
        assert abs(np.linalg.norm(p.value) - 1.0) < 1e-15

    def test_diameter_bound_range(self):
        with pytest.raises(ParameterError):
            Sphere(3, math.pi / 2.0)
        with pytest.raises(ParameterError):
            Sphere(1)


class TestSpd:
    def setup_method(self):
        self.m = Spd(2, 6.0)

    def test_exp_at_identity_is_matrix_exp(self):
        x = self.m.identity()
        v = self.m.tangent(x, np.diag([1.0, -1.0]))
        np.testing.assert_allclose(
            self.m.exp(x, v).value, np.diag([math.e, 1.0 / math.e]), atol=1e-12
        )

    def test_log_at_identity_is_matrix_log(self):
        x = self.m.identity()
        y = self.m.point(np.diag([math.e**2, 1.0]))
        np.testing.assert_allclose(self.m.log(x, y).value, np.diag([2.0, 0.0]), atol=1e-12)
        assert abs(self.m.distance(x, y) - 2.0) < 1e-12

    def test_inner_at_identity_is_frobenius(self):
        x = self.m.identity()
        u = self.m.tangent(x, np.diag([1.0, 2.0]))
        v = self.m.tangent(x, np.diag([3.0, 4.0]))
        assert abs(self.m.inner(u, v) - 11.0) < 1e-12

    def test_distance_is_affine_invariant_under_scaling(self):
        rng = np.random.default_rng(9)
        from geominimax.linalg import random_spd

        for _ in range(50):
            x = self.m.point(random_spd(2, 0.5, 2.0, rng))
            y = self.m.point(random_spd(2, 0.5, 2.0, rng))
            c = float(rng.uniform(0.1, 10.0))
            xc = self.m.point(c * x.value)
            yc = self.m.point(c * y.value)
            assert abs(self.m.distance(xc, yc) - self.m.distance(x, y)) < 1e-10

    def test_midpoint_is_equidistant(self):
        rng = np.random.default_rng(10)
        from geominimax.linalg import random_spd

        for _ in range(50):
            x = self.m.point(random_spd(2, 0.2, 4.0, rng))
            y = self.m.point(random_spd(2, 0.2, 4.0, rng))
            mid = self.m.exp(x, 0.5 * self.m.log(x, y))
            assert abs(self.m.distance(x, mid) - self.m.distance(mid, y)) < 1e-8

    def test_transport_hand_value(self):
        # With x = I and u = diag(2, 0): w = diag(e^2, 1), the transport
        # matrix is diag(e, 1), so u moves to diag(2 e^2, 0), and the
        # logarithm back to x is its negative.
        x = self.m.identity()
        u = self.m.tangent(x, np.diag([2.0, 0.0]))
        w = self.m.exp(x, u)
        moved = self.m.transport(u, w)
        np.testing.assert_allclose(moved.value, np.diag([2.0 * math.e**2, 0.0]), atol=1e-10)
        np.testing.assert_allclose(self.m.log(w, x).value, -moved.value, atol=1e-10)

    def test_rejects_bad_points(self):
        with pytest.raises(DomainError):
            self.m.point(np.diag([1.0, -1.0]))
        with pytest.raises(DomainError):
            self.m.point(np.diag([1.0, 0.0]))
        with pytest.raises(ParameterError):
            self.m.point(np.array([[1.0, 0.5], [0.0, 1.0]]))
        with pytest.raises(DomainError):
            self.m.point(np.full((2, 2), np.nan))

    def test_step_too_long_guard(self):
        x = self.m.identity()
        v = self.m.tangent(x, np.diag([400.0, 0.0]))
        with pytest.raises(StepTooLongError):
            self.m.exp(x, v)


class TestSharedProperties:
    def test_exp_log_round_trip(self):
        for m in make_all():
            rng = np.random.default_rng(42)
            r = sampling_radius(m)
            for _ in range(200):
                x = m.random_point(rng)
                v = m.random_tangent(x, rng, norm=float(rng.uniform(0.0, r)))
                back = m.log(x, m.exp(x, v))
                err = np.linalg.norm((back.value - v.value).ravel())
                assert err <= 1e-8 * max(1.0, np.linalg.norm(v.value.ravel())), m.name

    def test_exp_preserves_tangent_norm_as_distance(self):
        for m in make_all():
            rng = np.random.default_rng(43)
            r = sampling_radius(m)
            for _ in range(100):
                x = m.random_point(rng)
                v = m.random_tangent(x, rng, norm=float(rng.uniform(0.0, r)))
                d = m.distance(x, m.exp(x, v))
                assert abs(d - m.norm(v)) <= 1e-8 * max(1.0, m.norm(v)), m.name

    def test_transport_is_isometric(self):
        for m in make_all():
            rng = np.random.default_rng(44)
            for _ in range(30):
                x = m.random_point(rng)
                y = m.exp(x, m.random_tangent(x, rng, norm=float(rng.uniform(0.0, sampling_radius(m)))))
                basis = m.tangent_basis(x)
                moved = [m.transport(e, y) for e in basis]
                gram = np.array([[m.inner(a, b) for b in moved] for a in moved])
                np.testing.assert_allclose(gram, np.eye(m.dim), atol=1e-8)

    def test_log_of_base_after_exp_is_minus_transport(self):
        # If w = Exp_x(u) then Log_w(x) = -transport(u, w).
        for m in make_all():
            rng = np.random.default_rng(45)
            for _ in range(100):
                x = m.random_point(rng)
                u = m.random_tangent(x, rng, norm=float(rng.uniform(0.0, sampling_radius(m))))
                w = m.exp(x, u)
                lhs = m.log(w, x).value
                rhs = -m.transport(u, w).value
                assert np.linalg.norm((lhs - rhs).ravel()) <= 1e-8 * max(
                    1.0, np.linalg.norm(u.value.ravel())
                ), m.name

    def test_tangent_basis_is_orthonormal(self):
        for m in make_all():
            rng = np.random.default_rng(46)
            x = m.random_point(rng)
            basis = m.tangent_basis(x)
            assert len(basis) == m.dim
            gram = np.array([[m.inner(a, b) for b in basis] for a in basis])
            np.testing.assert_allclose(gram, np.eye(m.dim), atol=1e-10)

    def test_zero_tangent_is_fixed_point(self):
        for m in make_all():
            rng = np.random.default_rng(47)
            x = m.random_point(rng)
            y = m.exp(x, m.zero_tangent(x))
            assert np.allclose(y.value, x.value, atol=1e-14)
            assert m.distance(x, y) <= 1e-12

    def test_tangent_constructor_rejects_non_tangent(self):
        s = Sphere(3, 1.0)
        x = s.point([1.0, 0.0, 0.0])
        with pytest.raises(ContractError):
            s.tangent(x, [1.0, 0.0, 0.0])  # purely radial

    def test_mixed_base_arithmetic_rejected(self):
        m = Euclidean(2, 5.0)
        x = m.point([0.0, 0.0])
        y = m.point([1.0, 0.0])
        u = m.tangent(x, [1.0, 1.0])
        v = m.tangent(y, [1.0, 1.0])
        with pytest.raises(ContractError):
            _ = u + v
        with pytest.raises(ContractError):
            m.inner(u, v)

    def test_point_arrays_are_read_only(self):
        m = Euclidean(2, 5.0)
        x = m.point([0.0, 1.0])
        with pytest.raises(ValueError):
            x.value[0] = 3.0


class TestProduct:
    def setup_method(self):
        self.m = Product(Sphere(3, math.pi / 4.0), Spd(2, 4.0))

    def test_metadata(self):
        assert self.m.dim == 2 + 3
        assert self.m.kappa_min == -0.5
        assert self.m.kappa_max == 1.0
        assert abs(self.m.diameter_bound - math.hypot(math.pi / 4.0, 4.0)) < 1e-15

    def test_componentwise_exp_matches_factors_exactly(self):
        rng = np.random.default_rng(50)
        x = self.m.random_point(rng)
        v = self.m.random_tangent(x, rng, norm=0.7)
        xa, xb = self.m.split(x)
        va, vb = self.m.split_tangent(v)
        out = self.m.exp(x, v)
        oa, ob = self.m.split(out)
        assert np.array_equal(oa.value, self.m.a.exp(xa, va).value)
        assert np.array_equal(ob.value, self.m.b.exp(xb, vb).value)

    def test_distance_is_hypot_of_components(self):
        rng = np.random.default_rng(51)
        x = self.m.random_point(rng)
        y = self.m.random_point(rng)
        xa, xb = self.m.split(x)
        ya, yb = self.m.split(y)
        expected = math.hypot(self.m.a.distance(xa, ya), self.m.b.distance(xb, yb))
        assert abs(self.m.distance(x, y) - expected) < 1e-14

    def test_round_trip(self):
        rng = np.random.default_rng(52)
        for _ in range(50):
            x = self.m.random_point(rng)
            v = self.m.random_tangent(x, rng, norm=float(rng.uniform(0.0, 0.6)))
            back = self.m.log(x, self.m.exp(x, v))
            assert np.linalg.norm(back.value - v.value) <= 1e-8

    def test_join_split_inverse(self):
        rng = np.random.default_rng(53)
        pa = self.m.a.random_point(rng)
        pb = self.m.b.random_point(rng)
        joined = self.m.join(pa, pb)
        qa, qb = self.m.split(joined)
        assert qa is pa and qb is pb

    def test_point_validation_propagates(self):
        bad = np.concatenate([np.array([1.0, 1.0, 0.0]), np.eye(2).ravel()])
        with pytest.raises(ParameterError):
            self.m.point(bad)
