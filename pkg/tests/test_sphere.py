"""
Tests for the sphere geometry: geodesic distance, log/exp maps and the
signed normal distance of an edge frame.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from core.errors import AntipodalError, FoldedGeometryError, GeometryError
from core.mesh import EdgeFrame, build_edge_frames
from core.sphere import (
    TangentVector,
    d_arccos_dn,
    d_signed_distance,
    geodesic_distance,
    signed_normal_distance,
    sphere_exp,
    sphere_log,
)
from tests.conftest import hinge

vectors = arrays(np.float64, 3, elements=st.floats(-1.0, 1.0, allow_nan=False))


def unit(v):
    return v / np.linalg.norm(v)


@st.composite
def unit_vectors(draw):
    v = draw(vectors)
    assume(np.linalg.norm(v) > 1e-3)
    return unit(v)


class TestGeodesicDistance:
    def test_matches_arccos_on_random_frames(self, rng):
        a = rng.normal(size=(1000, 3))
        b = rng.normal(size=(1000, 3))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        expected = np.arccos(np.clip(np.einsum("ij,ij->i", a, b), -1.0, 1.0))
        np.testing.assert_allclose(geodesic_distance(a, b), expected, rtol=0, atol=1e-12)

    def test_equal_vectors(self):
        n = unit(np.array([1.0, 2.0, 3.0]))
        assert geodesic_distance(n, n) == 0.0

    def test_opposite_vectors(self):
        n = unit(np.array([1.0, 2.0, 3.0]))
        assert geodesic_distance(n, -n) == pytest.approx(np.pi, abs=1e-15)

    @given(unit_vectors(), unit_vectors())
    def test_symmetric_and_bounded(self, a, b):
        d = geodesic_distance(a, b)
        assert d == geodesic_distance(b, a)
        assert 0.0 <= d <= np.pi


class TestLogExp:
    def test_log_of_base_is_exactly_zero(self):
        n = unit(np.array([0.3, -0.2, 0.9]))
        result = sphere_log(n, n)
        assert result.length == 0.0
        np.testing.assert_array_equal(result.dir, np.zeros(3))

    def test_antipodal_is_rejected(self):
        n = unit(np.array([0.3, -0.2, 0.9]))
        with pytest.raises(AntipodalError):
            sphere_log(n, -n)

    @settings(max_examples=200)
    @given(unit_vectors(), unit_vectors())
    def test_exp_of_log_recovers_target(self, base, target):
        assume(np.dot(base, target) > -0.999)
        tangent = sphere_log(base, target)
        assert abs(np.dot(tangent.dir, base)) < 1e-12
        assert tangent.length == pytest.approx(geodesic_distance(base, target), abs=1e-12)
        np.testing.assert_allclose(sphere_exp(base, tangent.dir), target, atol=1e-12)

    def test_tangent_vector_validation(self):
        with pytest.raises(GeometryError):
            TangentVector(base=np.array([2.0, 0.0, 0.0]), dir=np.zeros(3))
        with pytest.raises(GeometryError):
            TangentVector(base=np.array([1.0, 0.0, 0.0]), dir=np.array([1.0, 0.0, 0.0]))


class TestSignedDistance:
    @pytest.mark.parametrize("alpha", [0.1, -0.1, 0.7, -0.7, 1.5, -1.5])
    def test_hinge_reproduces_angle(self, alpha):
        frame = build_edge_frames(hinge(alpha))[0]
        assert signed_normal_distance(frame) == pytest.approx(alpha, abs=1e-12)

    def test_coplanar_is_exactly_zero(self, two_triangles):
        frame = build_edge_frames(two_triangles)[0]
        assert signed_normal_distance(frame) == 0.0

    def test_cube_creases_are_convex(self, unit_cube):
        s = signed_normal_distance(unit_cube.edge_frames)
        creases = np.isclose(unit_cube.edge_frames.length, 1.0)
        np.testing.assert_allclose(s[creases], np.pi / 2, atol=1e-14)
        np.testing.assert_allclose(s[~creases], 0.0, atol=1e-14)

    def test_flipping_orientation_negates(self, cube3):
        rough = cube3.with_vertices(cube3.vertices + 0.01 * np.sin(7.0 * cube3.vertices[:, [1, 2, 0]]))
        flipped = rough.flipped()
        np.testing.assert_allclose(
            signed_normal_distance(flipped.edge_frames), -signed_normal_distance(rough.edge_frames), atol=1e-13
        )

    def test_swapping_sides_keeps_value(self):
        frame = build_edge_frames(hinge(0.4))[0]
        assert signed_normal_distance(frame.swapped()) == pytest.approx(signed_normal_distance(frame), abs=1e-15)

    def test_folded_frame(self):
        n = np.array([0.0, 0.0, 1.0])
        mu = np.array([0.0, -1.0, 0.0])
        frame = EdgeFrame(
            edge=(0, 1), face_plus=0, face_minus=1, length=1.0, n_plus=n, n_minus=-n, mu_plus=mu, mu_minus=mu
        )
        with pytest.raises(FoldedGeometryError):
            signed_normal_distance(frame)
        with pytest.raises(FoldedGeometryError):
            d_signed_distance(frame)

    def test_derivatives_are_negative_co_normals(self):
        frame = build_edge_frames(hinge(0.3))[0]
        d_plus, d_minus = d_signed_distance(frame)
        np.testing.assert_array_equal(d_plus, -frame.mu_plus)
        np.testing.assert_array_equal(d_minus, -frame.mu_minus)

    def test_derivative_matches_arccos_quotient_away_from_coplanar(self):
        # for a convex crease s = arccos(n+ . n-), so ds/dn+ equals the quotient form
        frame = build_edge_frames(hinge(0.8))[0]
        d_plus, _ = d_signed_distance(frame)
        quotient = d_arccos_dn(frame.n_plus, frame.n_minus)
        np.testing.assert_allclose(d_plus, quotient, atol=1e-12)

    def test_arccos_quotient_is_singular_for_parallel_normals(self):
        n = np.array([0.0, 0.0, 1.0])
        with pytest.raises(GeometryError):
            d_arccos_dn(n, n)
