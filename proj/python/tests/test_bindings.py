import math

import numpy as np
import pytest

import rotmhd


def test_random_state_and_norms():
    g = rotmhd.Grid(8, 8, 16.0, 16.0)
    a = rotmhd.random_state(g, seed=3, k_min=0.3, l2=2.0)
    b = rotmhd.random_state(g, seed=3, k_min=0.3, l2=2.0)
    assert a.u.shape == (3, 8, 8, 8)
    assert np.array_equal(a.u, b.u) and np.array_equal(a.b, b.b)
    assert rotmhd.h0s_norm(a, 1.0) > 0
    c = rotmhd.State(g, 2 * a.u, 2 * a.b)
    assert rotmhd.h0s_norm(c, 1.0) == pytest.approx(2 * rotmhd.h0s_norm(a, 1.0), rel=1e-12)
    with pytest.raises(ValueError):
        rotmhd.State(g, a.u[:, :4], a.b)


def test_eigen_propagator_matches_matrix_exponential():
    p = rotmhd.ModelParams.rotating(0.01, 1.0)
    xi = [0.7, -0.4, 1.3]
    t = 3.0
    e = rotmhd.eigen_propagator(xi, p, t)
    o = rotmhd.expm_propagator(rotmhd.assemble_symbol(xi, p), t)
    # act on a divergence-free six-vector
    u = np.cross(xi, [1.0, 2.0, 0.5])
    v = np.cross(xi, [-0.3, 0.2, 1.0])
    x = np.concatenate([u, v]).astype(complex)
    assert np.linalg.norm(e @ x - o @ x) <= 1e-9 * np.linalg.norm(o @ x)
    lam = rotmhd.eigenvalues(xi, p)
    assert all(math.isclose(l.real, -p.nu * (xi[0] ** 2 + xi[1] ** 2)) for l in lam)
    assert rotmhd.is_degenerate([1.0, 1.0, 0.0])


def test_schedule_and_simulation():
    alpha0 = rotmhd.admissible_alpha()
    assert alpha0 == pytest.approx(1 / 115)
    sch = rotmhd.schedule(0.01, alpha0, schedule_constant=2.0)
    assert sch["r"] == pytest.approx(1 / sch["R"])
    g = rotmhd.Grid(8, 8, 16.0, 16.0)
    U0 = rotmhd.random_state(g, seed=1, k_min=0.3, l2=1.0)
    p = rotmhd.ModelParams.rotating(0.2, 1.0)
    res = rotmhd.simulate(U0, p, dt=0.02, t_end=0.1, mode="coupled_split", cutoff=(0.8, 2.0))
    assert res["status"] == "ok"
    assert res["records"][-1]["t"] == pytest.approx(0.1)
    assert abs(res["records"][-1]["energy_residual"]) < 1e-6
    assert res["final_state"].u.shape == (3, 8, 8, 8)


def test_kernel_and_strichartz_smoke():
    k = rotmhd.kernel_decay("A", 0.25, 4.0, [1.0, 10.0, 100.0, 1000.0], samples=8, seed=2)
    assert len(k["sup_abs"]) == 4 and all(v > 0 for v in k["sup_abs"])
    s = rotmhd.strichartz_sweep([1.0, 0.01], [1.0], alpha=0.1, xi3_nodes=8, x_samples=8)
    assert len(s["norms"][0]) == 2
    assert s["predicted"][0] == pytest.approx((1 - 0.3) / 4)


def test_config_errors_name_the_key():
    with pytest.raises(rotmhd.ConfigError, match="unknown key 'solver.dtt'"):
        rotmhd.normalize_config({"kind": "simulate", "model": {"eps": 0.1},
                                 "solver": {"dt": 0.1, "t_end": 1, "dtt": 1}})
    full = rotmhd.normalize_config({"kind": "linear", "model": {"eps": 0.1}, "linear": {"random": 1}})
    assert full["linear"]["R"] == 4.0
    assert rotmhd.git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def test_run_experiment(tmp_path):
    cfg = {"kind": "linear", "seed": 4, "model": {"eps": 0.1, "alpha": 1.0},
           "linear": {"frequencies": [[0.5, 0.5, 1.0]], "random": 2}}
    m = rotmhd.run_experiment(cfg, tmp_path)
    assert m["exit_code"] == 0
    assert set(m["artifacts"]) == {"eigen.csv", "residuals.csv"}
    assert (tmp_path / "manifest.json").exists()
