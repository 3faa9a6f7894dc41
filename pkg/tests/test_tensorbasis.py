import numpy as np
import pytest

from hyperwave import (
    CoeffVector,
    DimensionMismatch,
    HyperIndex,
    InvalidExponent,
    IsoIndex,
    UnsupportedDimension,
    WrongSystem,
    build_transform,
    forward,
    hyper_forward,
    hyper_from_iso,
    hyper_inverse,
    iso_from_hyper,
    iso_synthesize,
    load_coeffs,
    rescale,
    save_coeffs,
)
from hyperwave.tensorbasis import _to_multiscale_array
from conftest import make_hyper, random_hyper


def coeff_dicts_close(a, b, tol=1e-12):
    da, db = a.as_dict(), b.as_dict()
    keys = set(da) | set(db)
    return all(abs(da.get(k, 0.0) - db.get(k, 0.0)) <= tol for k in keys)


class TestHyperForwardInverse:
    def test_constant_data_single_coefficient(self, haar):
        u = hyper_forward(haar, 2, np.full((8, 8), 1.5))
        d = u.as_dict()
        assert list(d) == [HyperIndex((0, 0), (0, 0))]
        np.testing.assert_allclose(d[HyperIndex((0, 0), (0, 0))], 1.5 * 8)

    def test_n1_reduces_to_univariate_forward(self, haar):
        rng = np.random.default_rng(0)
        c = rng.standard_normal(32)
        u = hyper_forward(haar, 1, c)
        ms = forward(haar, c)
        np.testing.assert_allclose(_to_multiscale_array(haar, u), ms.concat(), atol=1e-14)

    @pytest.mark.parametrize("n,m", [(1, 6), (2, 3), (2, 5), (3, 3)])
    def test_round_trip(self, haar, n, m):
        rng = np.random.default_rng(n * 10 + m)
        size = haar.delta_size(m)
        for _ in range(5):
            a = rng.standard_normal((size,) * n)
            back = hyper_inverse(haar, hyper_forward(haar, n, a))
            assert np.abs(back - a).max() <= 1e-12 * np.abs(a).max()

    def test_round_trip_non_orthonormal(self, scaled):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((16, 16))
        back = hyper_inverse(scaled, hyper_forward(scaled, 2, a))
        assert np.abs(back - a).max() <= 1e-12 * np.abs(a).max()

    def test_kronecker_oracle_2d(self, haar, scaled):
        rng = np.random.default_rng(1)
        for spec in (haar, scaled):
            m = 3
            size = spec.delta_size(m)
            _, td = build_transform(spec, m)
            k = np.kron(td.to_dense().T, td.to_dense().T)
            a = rng.standard_normal((size, size))
            expected = (k @ a.reshape(-1)).reshape(size, size)
            got = _to_multiscale_array(spec, hyper_forward(spec, 2, a))
            np.testing.assert_allclose(got, expected, atol=1e-13)

    def test_kronecker_oracle_3d(self, haar):
        rng = np.random.default_rng(2)
        m = 2
        _, td = build_transform(haar, m)
        tdt = td.to_dense().T
        k = np.kron(np.kron(tdt, tdt), tdt)
        a = rng.standard_normal((4, 4, 4))
        expected = (k @ a.reshape(-1)).reshape(4, 4, 4)
        got = _to_multiscale_array(haar, hyper_forward(haar, 3, a))
        np.testing.assert_allclose(got, expected, atol=1e-14)

    def test_axis_order_independence(self, haar):
        from hyperwave.transform1d import _analyze_array

        rng = np.random.default_rng(4)
        a = rng.standard_normal((16, 16))
        ax0_first = _analyze_array(haar, _analyze_array(haar, a, 4).T, 4).T
        ax1_first = _analyze_array(haar, _analyze_array(haar, a.T, 4).T, 4)
        assert np.abs(ax0_first - ax1_first).max() < 1e-13

    def test_single_unit_coefficient_synthesizes_constant(self, haar):
        u = make_hyper({((0, 0), (0, 0)): 1.0}, 2, 3)
        arr = hyper_inverse(haar, u)
        np.testing.assert_allclose(arr, np.full((8, 8), 1.0 / 8.0), atol=1e-14)

    def test_zero_coefficients_synthesize_to_zero(self, haar):
        u = make_hyper({}, 2, 3)
        np.testing.assert_array_equal(hyper_inverse(haar, u), np.zeros((8, 8)))

    def test_non_cubic_rejected(self, haar):
        with pytest.raises(DimensionMismatch):
            hyper_forward(haar, 2, np.zeros((8, 4)))

    def test_wrong_system_rejected(self, haar):
        u = hyper_forward(haar, 2, np.ones((4, 4)))
        v = iso_from_hyper(haar, u)
        with pytest.raises(WrongSystem):
            hyper_inverse(haar, v)

    def test_index_set_cardinality_audit(self, haar):
        # Every multiscale level block partitions |Delta_m|^n exactly.
        for n in (1, 2, 3):
            for m in (2, 3):
                total = 0
                for jvec in np.ndindex(*((m + 1,) * n)):
                    total += int(np.prod([haar.nabla_size(j) for j in jvec]))
                assert total == haar.delta_size(m) ** n


class TestChangeOfBasis:
    def test_diagonal_blocks_map_identically(self, haar):
        u = make_hyper({((2, 2), (1, 0)): 0.7, ((3, 3), (2, 3)): -1.1}, 2, 4)
        v = iso_from_hyper(haar, u)
        d = v.as_dict()
        assert d == {
            IsoIndex(2, (1, 1), (1, 0)): pytest.approx(0.7),
            IsoIndex(3, (1, 1), (2, 3)): pytest.approx(-1.1),
        }

    def test_coarsest_transform_is_identity(self, haar):
        u = make_hyper({((0, 1), (0, 0)): 1.0}, 2, 4)
        v = iso_from_hyper(haar, u)
        assert v.as_dict() == {IsoIndex(1, (0, 1), (0, 0)): pytest.approx(1.0)}

    @pytest.mark.parametrize("m", [2, 4])
    def test_round_trip_many_vectors(self, haar, m):
        rng = np.random.default_rng(m)
        for _ in range(25):
            u = random_hyper(haar, rng, 2, m)
            u2 = hyper_from_iso(haar, iso_from_hyper(haar, u))
            assert coeff_dicts_close(u, u2, tol=1e-12)

    def test_round_trip_non_orthonormal(self, scaled):
        rng = np.random.default_rng(8)
        u = random_hyper(scaled, rng, 2, 4)
        u2 = hyper_from_iso(scaled, iso_from_hyper(scaled, u))
        assert coeff_dicts_close(u, u2, tol=1e-12)

    def test_function_value_oracle(self, haar, scaled):
        # Both coefficient systems must synthesize to the same function; the
        # isotropic synthesis goes through the refinement masks only.
        rng = np.random.default_rng(6)
        for spec in (haar, scaled):
            u = random_hyper(spec, rng, 2, 4)
            v = iso_from_hyper(spec, u)
            lhs = iso_synthesize(spec, v)
            rhs = hyper_inverse(spec, u)
            assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(rhs).max()

    def test_zero_maps_to_zero(self, haar):
        u = make_hyper({}, 2, 3)
        assert iso_from_hyper(haar, u).num_entries == 0

    def test_dimension_three_rejected(self, haar):
        u = hyper_forward(haar, 3, np.ones((4, 4, 4)))
        with pytest.raises(UnsupportedDimension):
            iso_from_hyper(haar, u)

    def test_shifted_coarsest_level(self, haar_j2):
        rng = np.random.default_rng(14)
        a = rng.standard_normal((16, 16))
        u = hyper_forward(haar_j2, 2, a)
        assert int(u.levels.min()) == 2
        v = iso_from_hyper(haar_j2, u)
        u2 = hyper_from_iso(haar_j2, v)
        assert np.abs(hyper_inverse(haar_j2, u2) - a).max() <= 1e-12
        assert np.abs(iso_synthesize(haar_j2, v) - hyper_inverse(haar_j2, u)).max() <= 1e-10

    def test_isotropic_l2_isometry_for_orthonormal_basis(self, haar):
        # The per-block factors are orthogonal for Haar, so the change of
        # basis preserves the l2 norm exactly.
        rng = np.random.default_rng(7)
        u = random_hyper(haar, rng, 2, 5)
        v = iso_from_hyper(haar, u)
        assert abs(np.linalg.norm(v.values) - np.linalg.norm(u.values)) < 1e-10


class TestRescale:
    def test_identity_when_p_unchanged(self, haar):
        u = make_hyper({((1, 2), (0, 1)): 0.3}, 2, 3)
        assert rescale(u, 2.0) is u

    def test_formula_p2_to_p1(self):
        u = make_hyper({((1, 2), (0, 0)): 1.0}, 2, 4)
        r = rescale(u, 1.0)
        np.testing.assert_allclose(r.values, [2.0 ** (3 * (0.5 - 1.0))])
        assert r.p_norm == 1.0

    def test_isotropic_uses_n_times_level(self):
        from conftest import make_iso

        v = make_iso({(2, (1, 1), (0, 0)): 1.0}, 2, 4)
        r = rescale(v, 1.0)
        np.testing.assert_allclose(r.values, [2.0 ** (2 * 2 * (0.5 - 1.0))])

    def test_group_property(self, haar):
        rng = np.random.default_rng(11)
        u = random_hyper(haar, rng, 2, 3)
        back = rescale(rescale(u, 1.0), 2.0)
        assert np.abs(back.values - u.values).max() <= 1e-14 * np.abs(u.values).max()

    def test_infinite_exponent(self):
        u = make_hyper({((2, 1), (0, 0)): 1.0}, 2, 3)
        r = rescale(u, np.inf)
        np.testing.assert_allclose(r.values, [2.0 ** (3 * 0.5)])

    def test_invalid_exponent_rejected(self):
        u = make_hyper({((1, 1), (0, 0)): 1.0}, 2, 2)
        with pytest.raises(InvalidExponent):
            rescale(u, 0.0)


class TestCoeffFiles:
    def test_hyper_round_trip_and_byte_stability(self, haar, tmp_path):
        rng = np.random.default_rng(12)
        u = random_hyper(haar, rng, 2, 3)
        p1, p2 = tmp_path / "a.coeffs", tmp_path / "b.coeffs"
        save_coeffs(u, p1)
        loaded = load_coeffs(p1)
        assert loaded.as_dict() == u.as_dict()
        assert (loaded.system, loaded.n, loaded.p_norm, loaded.max_level,
                loaded.basis) == ("hyperbolic", 2, 2.0, 3, "haar")
        save_coeffs(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_iso_round_trip(self, haar, tmp_path):
        rng = np.random.default_rng(13)
        v = iso_from_hyper(haar, random_hyper(haar, rng, 2, 3))
        path = tmp_path / "v.coeffs"
        save_coeffs(v, path)
        assert load_coeffs(path).as_dict() == v.as_dict()

    def test_seventeen_digit_values_survive(self, tmp_path):
        u = make_hyper({((3, 2), (1, 0)): 1.0 / 3.0, ((0, 0), (0, 0)): np.pi}, 2, 4)
        path = tmp_path / "c.coeffs"
        save_coeffs(u, path)
        assert load_coeffs(path).as_dict() == u.as_dict()

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.coeffs"
        path.write_text("something else\n")
        with pytest.raises(DimensionMismatch):
            load_coeffs(path)

    def test_duplicate_indices_rejected(self, tmp_path):
        path = tmp_path / "dup.coeffs"
        path.write_text(
            "hyperwave-coeffs v1 hyperbolic n=2 p=2 basis=haar jmax=3\n"
            "1 1 0 0 1\n1 1 0 0 2\n"
        )
        with pytest.raises(DimensionMismatch):
            load_coeffs(path)


class TestCoeffVectorValidation:
    def test_unknown_system(self):
        with pytest.raises(WrongSystem):
            CoeffVector("spherical", 2, 2.0, 3, "haar",
                        np.zeros((0, 2), int), np.zeros((0, 2), int), np.zeros(0))

    def test_level_beyond_truncation(self):
        with pytest.raises(DimensionMismatch):
            make_hyper({((4, 0), (0, 0)): 1.0}, 2, 3)

    def test_dimension_out_of_range(self):
        with pytest.raises(UnsupportedDimension):
            CoeffVector("hyperbolic", 4, 2.0, 3, "haar",
                        np.zeros((0, 4), int), np.zeros((0, 4), int), np.zeros(0))
