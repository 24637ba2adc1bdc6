import numpy as np
import pytest

from nhoc.geometry import (AxiomReport, CotangentDeltaMap, DeltaMap,
                           canonical_symplectic_matrix,
                           check_discretization_axioms, cotangent_lift_forward,
                           cotangent_lift_inverse, delta_map_forward,
                           delta_map_inverse, symplecticity_defect)
from nhoc.integrators import IntegratorSpec, make_step

from oracles import diagram_cotangent_lift


class TestDeltaMap:
    def test_midpoint_split(self):
        q0, q1 = delta_map_forward(2.0, 1.0, 0.5)
        assert q0 == pytest.approx(1.5, abs=0)
        assert q1 == pytest.approx(2.5, abs=0)

    @pytest.mark.parametrize("delta", [0.0, 0.3, 0.5, 1.0])
    def test_zero_vector_doubles_base(self, delta):
        q0, q1 = delta_map_forward(7.0, 0.0, delta)
        assert q0 == 7.0 and q1 == 7.0

    def test_initial_point_split(self):
        q0, q1 = delta_map_forward(0.0, 2.0, 0.0)
        assert q0 == 0.0 and q1 == 2.0

    def test_inverse_of_midpoint_case(self):
        q, v = delta_map_inverse(1.5, 2.5, 0.5)
        assert q == 2.0 and v == 1.0

    def test_inverse_on_diagonal(self):
        q, v = delta_map_inverse(3.7, 3.7, 0.81)
        assert q == 3.7 and v == 0.0

    def test_inverse_initial_point(self):
        # affine inverse, then confirmed by the forward map
        q, v = delta_map_inverse(0.0, 2.0, 0.0)
        assert q == 0.0 and v == 2.0
        assert delta_map_forward(q, v, 0.0) == (pytest.approx(0.0), pytest.approx(2.0))

    def test_round_trip_random(self, rng):
        for _ in range(50):
            delta = rng.uniform(0, 1)
            q = rng.standard_normal(4)
            v = rng.standard_normal(4)
            a, b = delta_map_forward(q, v, delta)
            q2, v2 = delta_map_inverse(a, b, delta)
            assert np.max(np.abs(q2 - q)) < 1e-14
            assert np.max(np.abs(v2 - v)) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            delta_map_forward(np.zeros(2), np.zeros(3), 0.5)
        with pytest.raises(ValueError, match="mismatch"):
            delta_map_inverse(np.zeros(2), np.zeros(3), 0.5)

    def test_delta_map_type_validates(self):
        with pytest.raises(ValueError):
            DeltaMap(delta=1.5, dim=2)
        with pytest.raises(ValueError):
            DeltaMap(delta=0.5, dim=0)
        m = DeltaMap(0.25, 3)
        a, b = m(np.zeros(3), np.ones(3))
        assert np.allclose(a, -0.25) and np.allclose(b, 0.75)


class TestCotangentLift:
    def test_midpoint_lift_worked_case(self):
        q0, p0, q1, p1 = cotangent_lift_forward(0.0, 0.0, 2.0, 4.0, 0.5)
        assert (q0, p0, q1, p1) == (-1.0, -2.0, 1.0, 2.0)

    def test_zero_tangent(self, rng):
        q, p = rng.standard_normal(3), rng.standard_normal(3)
        q0, p0, q1, p1 = cotangent_lift_forward(q, p, np.zeros(3), np.zeros(3), 0.7)
        assert np.array_equal(q0, q) and np.array_equal(q1, q)
        assert np.array_equal(p0, p) and np.array_equal(p1, p)

    def test_initial_point_lift(self):
        # cross-weighting: at delta=0 the first momentum absorbs the full pdot
        q0, p0, q1, p1 = cotangent_lift_forward(1.0, 1.0, 1.0, 1.0, 0.0)
        assert (q0, p0, q1, p1) == (1.0, 0.0, 2.0, 1.0)

    @pytest.mark.parametrize("delta", [0.0, 0.5, 1.0])
    def test_matches_diagram_composition(self, delta, rng):
        for _ in range(10):
            q, p, qd, pd = (rng.standard_normal(3) for _ in range(4))
            got = cotangent_lift_forward(q, p, qd, pd, delta)
            want = diagram_cotangent_lift(q, p, qd, pd, delta)
            for g, w in zip(got, want):
                assert np.max(np.abs(g - w)) < 1e-6

    def test_inverse_of_worked_case(self):
        q, p, qd, pd = cotangent_lift_inverse(-1.0, -2.0, 1.0, 2.0, 0.5)
        assert (q, p, qd, pd) == (0.0, 0.0, 2.0, 4.0)

    def test_inverse_on_diagonal(self, rng):
        z = rng.standard_normal(2)
        pz = rng.standard_normal(2)
        q, p, qd, pd = cotangent_lift_inverse(z, pz, z, pz, 0.3)
        assert np.allclose(q, z) and np.allclose(p, pz)
        assert np.all(qd == 0) and np.all(pd == 0)

    def test_inverse_initial_point(self):
        q, p, qd, pd = cotangent_lift_inverse(1.0, 0.0, 2.0, 1.0, 0.0)
        assert (q, p, qd, pd) == (1.0, 1.0, 1.0, 1.0)

    def test_round_trip_random(self, rng):
        for _ in range(50):
            delta = rng.uniform(0, 1)
            blocks = [rng.standard_normal(3) for _ in range(4)]
            lifted = cotangent_lift_forward(*blocks, delta)
            back = cotangent_lift_inverse(*lifted, delta)
            for got, want in zip(back, blocks):
                assert np.max(np.abs(got - want)) < 1e-14

    def test_midpoint_lift_formula_entrywise(self, rng):
        # closed-form agreement on 100 random inputs
        for _ in range(100):
            q, p, qd, pd = (rng.standard_normal(4) for _ in range(4))
            q0, p0, q1, p1 = cotangent_lift_forward(q, p, qd, pd, 0.5)
            assert np.max(np.abs(q0 - (q - 0.5 * qd))) < 1e-14
            assert np.max(np.abs(p0 - (p - 0.5 * pd))) < 1e-14
            assert np.max(np.abs(q1 - (q + 0.5 * qd))) < 1e-14
            assert np.max(np.abs(p1 - (p + 0.5 * pd))) < 1e-14

    def test_type_wrapper(self):
        m = CotangentDeltaMap(0.5, 2)
        out = m.forward(np.zeros(2), np.zeros(2), 2 * np.ones(2), 4 * np.ones(2))
        back = m.inverse(*out)
        assert np.allclose(back[2], 2.0) and np.allclose(back[3], 4.0)


class TestAxiomCheck:
    @pytest.mark.parametrize("delta", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_delta_map_passes(self, delta, rng):
        for _ in range(20):
            q = rng.uniform(-3, 3, size=3)
            rep = check_discretization_axioms(
                lambda qq, vv: delta_map_forward(qq, vv, delta), q,
                tol=1e-8, fd_step=1e-5)
            assert rep.passed
            assert rep.zero_defect < 1e-8 and rep.identity_defect < 1e-8

    def test_degenerate_pair_fails_identity_axiom(self):
        rep = check_discretization_axioms(lambda q, v: (q, q), np.ones(2), tol=1e-8)
        assert rep.zero_defect < 1e-14
        assert rep.identity_defect == pytest.approx(1.0, abs=1e-9)
        assert not rep.passed

    def test_accepts_bound_map(self):
        rep = check_discretization_axioms(DeltaMap(0.5, 2), np.zeros(2))
        assert rep.passed

    def test_report_is_data(self):
        rep = AxiomReport(1e-10, 1e-9, 1e-8)
        assert rep.passed


class TestSymplecticityDefect:
    def test_identity_map_is_exact(self, rng):
        z = rng.standard_normal(6)
        assert symplecticity_defect(lambda zz, h: zz, z, 0.1) == 0.0

    def test_canonical_matrix(self):
        J = canonical_symplectic_matrix(2)
        assert np.array_equal(J, np.array([[0, 0, 1, 0], [0, 0, 0, 1],
                                           [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=float))

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            symplecticity_defect(lambda z, h: z, np.zeros(3), 0.1)

    def test_retraction_step_is_symplectic(self, sleigh, benchmark_init):
        step = make_step(IntegratorSpec("retraction", delta=0.5))
        defect = symplecticity_defect(
            lambda z, h: step(sleigh, z, h)[0], benchmark_init, 0.01, 1e-5)
        assert defect < 1e-6

    def test_rk2_defect_dominates_symplectic(self, sleigh, benchmark_init):
        # the non-symplectic defect exceeds the symplectic one by >= 2 orders
        mid = make_step(IntegratorSpec("retraction", delta=0.5))
        rk2 = make_step(IntegratorSpec("rk2"))
        d_mid = symplecticity_defect(lambda z, h: mid(sleigh, z, h)[0],
                                     benchmark_init, 0.01, 1e-5)
        d_rk2 = symplecticity_defect(lambda z, h: rk2(sleigh, z, h)[0],
                                     benchmark_init, 0.01, 1e-5)
        assert d_rk2 > 100.0 * d_mid
