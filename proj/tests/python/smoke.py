"""End-to-end smoke test of the python layer (small sizes, exact traces)."""

import math
import os
import tempfile

import kisim


def approx(value, expected, tol, label):
    assert abs(value - expected) <= tol, f"{label}: {value} vs {expected} (tol {tol})"


def main():
    # Analytic layer.
    approx(kisim.d_sigma_x(1.0, 1.4), 0.485126, 1e-6, "d_sigma_x")
    approx(kisim.delta_from_prime(0.04, 6), 0.08, 1e-15, "delta_from_prime")
    d_ext = kisim.d_sigma_x(1.0, 1.4) * 24
    approx(kisim.tau_nonergodic(d_ext, 0.02), 14.65, 0.01, "tau_nonergodic")
    approx(kisim.tau_ergodic(2.54 * 24, 0.01), 164.0, 0.1, "tau_ergodic")

    report = kisim.theory_report(kisim.Params(), L=24, delta_prime=0.02, S_A=2.54 * 24)
    for key in ("d_sigma_x", "tau_nonergodic", "t_star_nonergodic", "plateau",
                "tau_ergodic", "field_map"):
        assert key in report, f"theory_report missing {key}"
    approx(report["plateau"], 2.0 ** -12, 1e-15, "plateau")

    # Dynamics at a small exact size.
    params = kisim.Params(j_z=1.0, h_x=1.4, h_z=0.4)
    corr = kisim.correlation_series(params, 8, observable="M_x", t_max=40, mode="exact")
    assert len(corr) == 41
    approx(corr.values[0].real, 1.0, 1e-12, "C(0) per site")
    meta = kisim.series_meta(corr)
    assert meta["kind"] == "correlation" and meta["L"] == 8 and meta["mode"] == "exact"

    stats = kisim.estimate_statistics(corr)
    assert stats["regime"] in ("ergodic", "non_ergodic", "unresolved")
    assert "S_A" in stats and "D_A" in stats

    fid = kisim.fidelity_series(params, 8, 0.1, 40, mode="exact")
    approx(abs(fid.values[0]), 1.0, 1e-12, "F(0)")
    assert all(abs(v) <= 1.0 + 1e-9 for v in fid.values), "fidelity above 1"
    fit = kisim.fit_decay(fid, 8)
    assert fit["regime_fit"] in ("ergodic", "non_ergodic")
    assert fit["n_points"] >= 5 and fit["tau_fit"] > 0

    # Quadratic response agrees with the directly simulated fidelity at small
    # delta and early times (resummed comparison).
    weak = kisim.fidelity_series(params, 8, 0.005, 10, mode="exact")
    for t in range(11):
        g = 1.0 - kisim.fidelity_quadratic(corr, 0.005, t)
        approx(abs(weak.values[t]), math.exp(-g), 1e-3, f"quadratic response t={t}")

    # Symmetrized fidelity is delta-symmetric in modulus.
    plus = kisim.fidelity_series(params, 6, 0.1, 10, mode="exact", symmetrized=True)
    minus = kisim.fidelity_series(params, 6, -0.1, 10, mode="exact", symmetrized=True)
    for a, b in zip(plus.values, minus.values):
        approx(abs(a), abs(b), 1e-14, "symmetrized modulus")

    # Dense oracle.
    oracle = kisim.oracle_check(5, params, 0.02, 10)
    assert oracle["worst"] <= 1e-10, f"oracle deviation {oracle['worst']}"

    # CSV round trip preserves every bit.
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "series.csv")
        kisim.write_timeseries_csv(path, corr)
        back = kisim.read_timeseries_csv(path)
        assert list(back.times) == list(corr.times)
        assert list(back.values) == list(corr.values)
        assert list(back.stderrs) == list(corr.stderrs)
        assert kisim.series_meta(back) == meta

    # Stochastic runs are seed-deterministic.
    s1 = kisim.correlation_series(params, 6, t_max=10, n_samples=4, seed=5)
    s2 = kisim.correlation_series(params, 6, t_max=10, n_samples=4, seed=5)
    assert list(s1.values) == list(s2.values), "same seed must reproduce bitwise"

    print(f"python smoke OK (kisim {kisim.__version__})")


if __name__ == "__main__":
    main()
