import numpy as np
import pytest

from nhoc.harness import (ExperimentConfig, MethodSummary, build_model,
                          convergence_study, parse_config_file, phi_d,
                          read_trajectory_csv, run_experiment,
                          state_column_names)
from nhoc.integrators import IntegratorSpec, integrate
from nhoc.sleigh import BENCHMARK_INIT

EXPECTED_HEADER = "step,t,x,y,theta,z1,z2,px,py,ptheta,p1,p2,H,phi_d,newton_iters"


def short_config(out_dir, integrators=None, n=100):
    return ExperimentConfig(
        model="sleigh",
        init=np.array(BENCHMARK_INIT),
        h=0.005,
        t_final=0.005 * n,
        integrators=integrators or (IntegratorSpec("retraction", delta=0.5),),
        out_dir=out_dir)


class TestPhiD:
    def test_no_motion(self):
        assert phi_d([1.0, 2.0, 0.3], [1.0, 2.0, 0.3]) == 0.0

    def test_unit_forward_step_across_heading(self):
        assert phi_d([0.0, 0.0, np.pi / 2], [1.0, 0.0, np.pi / 2]) == pytest.approx(1.0)

    def test_retraction_steps_annihilate(self, sleigh, benchmark_init):
        spec = IntegratorSpec("retraction", delta=0.5)
        traj = integrate(sleigh, benchmark_init, 0.005, 200, spec)
        worst = max(abs(phi_d(traj.states[i][:3], traj.states[i + 1][:3]))
                    for i in range(traj.n_steps))
        assert worst <= 10.0 * spec.newton_tol


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(h=0.0)
        with pytest.raises(ValueError):
            ExperimentConfig(t_final=-1.0)
        with pytest.raises(ValueError):
            ExperimentConfig(h=10.0, t_final=1.0)  # no usable step count

    def test_step_count(self):
        assert ExperimentConfig(h=0.005, t_final=20.0).n_steps == 4000

    def test_registry(self):
        model, constraint = build_model("sleigh", {"m": 2.0})
        assert model.dist.rho(np.zeros(3))[0, 1] == pytest.approx(0.5)
        assert constraint is phi_d
        with pytest.raises(ValueError, match="unknown model"):
            build_model("unicycle")


class TestCsvOutput:
    def test_schema_and_shapes(self, sleigh, tmp_path):
        run_experiment(short_config(tmp_path, n=50))
        path = tmp_path / "retraction_d0.5.csv"
        text = path.read_text().splitlines()
        assert text[0] == EXPECTED_HEADER
        assert len(text) == 52  # header + 51 rows
        row0 = text[1].split(",")
        assert row0[0] == "0" and row0[-1] == "" and row0[-2] == ""
        row1 = text[2].split(",")
        assert row1[-1] != "" and row1[-2] != ""

    def test_float_cells_round_trip(self, sleigh, tmp_path):
        run_experiment(short_config(tmp_path, n=20))
        header, rows = read_trajectory_csv(tmp_path / "retraction_d0.5.csv")
        assert header == EXPECTED_HEADER.split(",")
        traj = integrate(sleigh, np.array(BENCHMARK_INIT), 0.005, 20,
                         IntegratorSpec("retraction", delta=0.5))
        got_state = np.array([rows[-1][2:12]])
        assert np.array_equal(got_state[0], traj.states[-1])

    def test_column_names(self, sleigh):
        assert state_column_names(sleigh) == [
            "x", "y", "theta", "z1", "z2", "px", "py", "ptheta", "p1", "p2"]

    def test_monotone_time(self, tmp_path):
        run_experiment(short_config(tmp_path, n=30))
        _, rows = read_trajectory_csv(tmp_path / "retraction_d0.5.csv")
        times = [r[1] for r in rows]
        assert all(b > a for a, b in zip(times, times[1:]))


class TestRunExperiment:
    def test_all_methods_write_files(self, tmp_path):
        specs = (IntegratorSpec("retraction", delta=0.5), IntegratorSpec("verlet"),
                 IntegratorSpec("rk2"), IntegratorSpec("rk4"), IntegratorSpec("gl4"))
        summaries = run_experiment(short_config(tmp_path, integrators=specs, n=40))
        assert [s.method for s in summaries] == [
            "retraction_d0.5", "verlet", "rk2", "rk4", "gl4"]
        for s in summaries:
            assert (tmp_path / f"{s.method}.csv").exists()
            assert s.status == "ok"
            assert np.isfinite(s.max_abs_dH)
        summary_text = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary_text[0] == ("method,max_abs_phi_d,max_abs_dH,"
                                   "mean_newton_iters,wall_time_s,status")
        assert len(summary_text) == 6

    def test_divergence_recorded_not_raised(self, tmp_path):
        specs = (IntegratorSpec("retraction", delta=0.5, newton_max_iters=1),
                 IntegratorSpec("rk2"))
        config = ExperimentConfig(model="sleigh", init=np.array(BENCHMARK_INIT),
                                  h=1e6, t_final=3e6, integrators=specs,
                                  out_dir=tmp_path)
        summaries = run_experiment(config)
        assert summaries[0].status.startswith("diverged@")
        assert summaries[1].status == "ok"  # explicit method still runs

    def test_requires_out_dir_and_init(self):
        with pytest.raises(ValueError, match="out_dir"):
            run_experiment(ExperimentConfig(init=np.zeros(10)))
        with pytest.raises(ValueError, match="init"):
            run_experiment(ExperimentConfig(out_dir="/tmp/x"))

    def test_rerun_is_bit_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_experiment(short_config(a, n=60))
        run_experiment(short_config(b, n=60))
        assert (a / "retraction_d0.5.csv").read_bytes() == \
               (b / "retraction_d0.5.csv").read_bytes()


class TestAdmissibility:
    @pytest.mark.parametrize("kind", ["retraction", "verlet"])
    def test_implicit_steps_stay_on_distribution(self, sleigh, benchmark_init, kind):
        """Per-step admissibility over the full benchmark horizon.

        The solver holds its residual at newton_tol, but the residual
        recomputed from the *stored* states also carries the storage
        rounding of the coordinates divided by h (the heading coordinate
        reaches -671 by the end of the run), so the bound allows for that
        floating-point floor explicitly.
        """
        from nhoc.nonholonomic import admissibility_residual
        spec = IntegratorSpec(kind, delta=0.5)
        traj = integrate(sleigh, benchmark_init, 0.005, 4000, spec)
        assert traj.ok
        assert int(np.max(traj.newton_iters)) <= 5  # Euler guess stays close
        strict = 10.0 * spec.newton_tol
        for i in range(traj.n_steps):
            r = admissibility_residual(sleigh, traj.states[i][:3],
                                       traj.states[i + 1][:3],
                                       traj.midpoints[i][3:5], 0.005)
            storage_floor = 3.0 * np.spacing(np.max(np.abs(traj.states[i][:3]))) / 0.005
            assert r <= strict + storage_floor, (i, r)
            if np.max(np.abs(traj.states[i][:3])) < 64.0:
                assert r <= strict, (i, r)


class TestConvergenceStudy:
    def test_orders_on_short_window(self, sleigh):
        from nhoc.cli import CONVERGENCE_INIT
        specs = (IntegratorSpec("retraction", delta=0.5), IntegratorSpec("rk2"))
        fits = convergence_study(sleigh, np.array(CONVERGENCE_INIT), specs,
                                 [0.02, 0.01, 0.005], 0.2, ref_h=1e-4)
        for fit in fits:
            assert fit.slope == pytest.approx(2.0, abs=0.3)

    def test_h_list_validation(self, sleigh):
        with pytest.raises(ValueError):
            convergence_study(sleigh, np.zeros(10), (IntegratorSpec("rk2"),),
                              [0.01, 0.02, 0.04], 1.0)
        with pytest.raises(ValueError):
            convergence_study(sleigh, np.zeros(10), (IntegratorSpec("rk2"),),
                              [0.02, 0.01], 1.0)


class TestConfigFile:
    def test_parse(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("""
# benchmark setup
model = sleigh
integrator = retraction
delta = 0.5          # midpoint
h = 0.005
t_final = 20
init = 1,1,3.141592653589793,0.05,0.05,0,1,0,0,0
""")
        values = parse_config_file(path)
        assert values["model"] == "sleigh"
        assert values["delta"] == "0.5"
        assert values["init"].startswith("1,1,3.14")

    def test_bad_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("model sleigh\n")
        with pytest.raises(ValueError, match="bad config line"):
            parse_config_file(path)
