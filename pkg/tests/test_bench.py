import io

import numpy as np
import pytest
import sympy as sp

from wsvd import bench
from wsvd.approx import project, standard_interpolant, truncate
from wsvd.basis import build_basis
from wsvd.cubature import rule_for_budget
from wsvd.exceptions import EmptyGrid
from wsvd.geometry import DOMAINS, get_domain, halton_points, uniform_grid
from wsvd.kernels import Kernel


def sympy_franke():
    x, y = sp.symbols("x y", real=True)
    expr = (
        sp.Rational(3, 4) * sp.exp(-((9 * x - 2) ** 2) / 4 - (9 * y - 2) ** 2 / 4)
        + sp.Rational(3, 4) * sp.exp(-((9 * x + 1) ** 2) / 49 - (9 * y + 1) / 10)
        + sp.Rational(1, 2) * sp.exp(-((9 * x - 7) ** 2) / 4 - (9 * y - 3) ** 2 / 4)
        - sp.Rational(1, 5) * sp.exp(-((9 * x - 4) ** 2) - (9 * y - 7) ** 2)
    )
    return x, y, expr


class TestTestFunctions:
    def test_franke_symbolic(self):
        x, y, expr = sympy_franke()
        P = np.random.default_rng(0).uniform(-1, 1, (40, 2))
        got = bench.franke(P)
        want = [float(expr.subs({x: sp.Float(a, 30), y: sp.Float(b, 30)}).evalf(30)) for a, b in P]
        np.testing.assert_allclose(got, want, rtol=1e-14, atol=1e-15)

    def test_oscillatory_origin(self):
        assert bench.test_function("oscillatory", np.array([0.0, 0.0])) == 1.0

    @pytest.mark.parametrize("t", [-0.7, 0.0, 0.3, 1.0])
    def test_singular_on_diagonal(self, t):
        assert bench.test_function("singular", np.array([t, t])) == 0.0

    def test_singular_value(self):
        assert bench.singular_exp(np.array([0.0, 1.0])) == pytest.approx(np.e - 1, rel=1e-15)

    def test_native_center(self):
        want = -2 + np.exp(-8) + 3 * np.exp(-1.28)
        got = bench.test_function("native", np.array([0.5, 0.5]))
        assert got == pytest.approx(want, rel=1e-14)

    def test_aliases_and_unknown(self):
        assert bench.get_test_function("SingularExp") is bench.singular_exp
        assert bench.get_test_function("NativeGauss") is bench.native_gauss
        with pytest.raises(ValueError):
            bench.get_test_function("peaks")

    @pytest.mark.parametrize("name", sorted(bench.TEST_FUNCTIONS))
    @pytest.mark.parametrize("domain", sorted(DOMAINS))
    def test_finite_on_bbox(self, name, domain):
        x0, x1, y0, y1 = get_domain(domain).bbox
        gx, gy = np.meshgrid(np.linspace(x0, x1, 30), np.linspace(y0, y1, 30))
        P = np.column_stack([gx.ravel(), gy.ravel()])
        v1 = bench.get_test_function(name)(P)
        assert v1.shape == (900,) and np.all(np.isfinite(v1))
        np.testing.assert_array_equal(v1, bench.get_test_function(name)(P))


class TestMetrics:
    grid = uniform_grid(7, get_domain("square"))

    def test_exact(self):
        assert bench.rmse(bench.franke, bench.franke, self.grid) == 0.0

    def test_constant(self):
        zero = lambda p: np.zeros(len(p))  # noqa: E731
        c = lambda p: np.full(len(p), -2.5)  # noqa: E731
        assert bench.rmse(zero, c, self.grid) == pytest.approx(2.5, rel=1e-15)
        assert bench.max_abs_error(zero, c, self.grid) == 2.5

    def test_single_point(self):
        g = np.array([[0.1, 0.2]])
        d = bench.rmse(bench.franke, bench.oscillatory, g)
        assert d == pytest.approx(abs(bench.franke(g) - bench.oscillatory(g))[0], rel=1e-15)

    def test_empty(self):
        with pytest.raises(EmptyGrid):
            bench.rmse(bench.franke, bench.franke, np.empty((0, 2)))
        with pytest.raises(EmptyGrid):
            bench.max_abs_error(bench.franke, bench.franke, np.empty((0, 2)))


class TestRunExperiment:
    def test_sweep_full_order_matches_untruncated(self):
        base = dict(kernel="gauss", eps=[4.0], domain="disk", n=[200], testfn="oscillatory", grid=30)
        full = bench.run_experiment(bench.ExperimentConfig(**base))
        assert len(full) == 1 and full[0].error == ""
        nact = full[0].M
        sweep = bench.run_experiment(
            bench.ExperimentConfig(**base, m=list(range(0, nact + 1, 20)) + [nact])
        )
        assert sweep[-1].M == nact
        assert sweep[-1].rmse == full[0].rmse
        assert sweep[0].M == 0 and sweep[0].sigma_min is None

    def test_rmse_matches_reprojection(self):
        cfg = bench.ExperimentConfig(
            kernel="imq", eps=[4.0], domain="lens", n=[150], testfn="franke", grid=30,
            m=[0, 10, 40, 80, 120],
        )
        rows = bench.run_experiment(cfg)
        domain = get_domain("lens")
        rule = rule_for_budget(domain, 150)
        basis = build_basis(Kernel("imq", 4.0), rule)
        grid = uniform_grid(30, domain)
        # independently re-project keeping only M basis functions
        for r in rows:
            M = r.M
            Vm = basis.v_matrix[:, :M]
            coeffs = Vm.T @ (rule.weights * bench.franke(rule.nodes)) / basis.sigma2[:M]
            approx = basis(grid)[:, :M] @ coeffs
            ref = float(np.sqrt(np.mean((approx - bench.franke(grid)) ** 2)))
            assert abs(r.rmse - ref) <= 1e-12

    def test_truncate_tol(self):
        cfg = bench.ExperimentConfig(eps=[1.0], domain="disk", n=[300], truncate_tol=1e-17, grid=20)
        (row,) = bench.run_experiment(cfg)
        basis = build_basis(Kernel("gauss", 1.0), rule_for_budget(get_domain("disk"), 300))
        a = truncate(project(basis, np.zeros(len(basis))), sigma_tol=1e-17)
        assert row.M == a.m_active < row.N

    def test_row_invariants(self):
        cfg = bench.ExperimentConfig(kernel="mat3", eps=[2.0, 8.0], n=[100, 300], domain="cutdisk", grid=20, m=[5, 50])
        rows = bench.run_experiment(cfg)
        assert [(r.eps, r.M) for r in rows] == [
            (2.0, 5), (2.0, 50), (2.0, 5), (2.0, 50), (8.0, 5), (8.0, 50), (8.0, 5), (8.0, 50)
        ]
        for r in rows:
            assert r.rmse >= 0 and r.max_abs_err >= r.rmse
            assert r.M <= r.N
            assert r.trace_residual < 1e-10
            assert 0 < r.sigma_min <= r.sigma_max
            assert r.runtime_ms is None

    def test_std_method(self):
        cfg = bench.ExperimentConfig(method="std", points="halton", n=[50], eps=[4.0], domain="square", testfn="native", grid=20)
        (row,) = bench.run_experiment(cfg)
        assert row.N == row.M == 50 and row.error == ""
        X = halton_points(50, get_domain("square"))
        s = standard_interpolant(Kernel("gauss", 4.0), X, bench.native_gauss(X))
        grid = uniform_grid(20, get_domain("square"))
        assert row.rmse == bench.rmse(s, bench.native_gauss, grid)

    def test_errors_recorded_per_row(self):
        cfg = bench.ExperimentConfig(method="std", points="grid", n=[196, 25], eps=[1.0], domain="square", grid=10)
        rows = bench.run_experiment(cfg)
        assert "SingularMatrix" in rows[0].error and rows[0].rmse is None
        assert rows[1].error == "" and rows[1].rmse is not None

    def test_timing(self):
        cfg = bench.ExperimentConfig(n=[50], grid=10, timing=True)
        (row,) = bench.run_experiment(cfg)
        assert row.runtime_ms > 0

    @pytest.mark.parametrize(
        "bad",
        [
            dict(domain="triangle"),
            dict(testfn="peaks"),
            dict(method="rbf"),
            dict(m=[5], truncate_tol=1e-10),
            dict(n=[0]),
            dict(kernel="lg1", eps=[1.0], domain="square", method="std", points="cubature"),
        ],
    )
    def test_invalid_config(self, bad):
        with pytest.raises(ValueError):
            bench.run_experiment(bench.ExperimentConfig(**bad))


class TestCsv:
    def test_header_and_formatting(self):
        rows = [bench.ResultRow(N=3, M=2, eps=0.1, kernel="gauss", domain="disk", testfn="franke", rmse=1e-17)]
        text = bench.rows_to_csv(rows)
        lines = text.splitlines()
        assert lines[0] == ",".join(bench.CSV_FIELDS)
        assert lines[0].startswith("N,M,eps,kernel,domain,testfn,rmse,max_abs_err")
        assert lines[1].startswith("3,2,0.1,gauss,disk,franke,1e-17,,")

    def test_round_trip(self):
        v = 0.1 + 0.2
        rows = [bench.ResultRow(N=1, M=1, eps=v, kernel="g", domain="d", testfn="t", rmse=v)]
        line = bench.rows_to_csv(rows).splitlines()[1].split(",")
        assert float(line[2]) == v

    def test_write_to_buffer(self):
        buf = io.StringIO()
        bench.write_csv(buf, ["j", "sigma2"], [(1, 0.5), (2, 0.25)])
        assert buf.getvalue() == "j,sigma2\n1,0.5\n2,0.25\n"

    def test_spectrum_rows(self):
        b = build_basis(Kernel("gauss", 4.0), rule_for_budget(get_domain("square"), 16))
        rows = bench.spectrum_rows(b)
        assert [j for j, _ in rows] == list(range(1, 17))
        assert sum(s for _, s in rows) == pytest.approx(1.0, rel=1e-12)
