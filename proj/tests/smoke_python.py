"""End-to-end smoke test of the python module against known behavior."""

import math
import sys

import _qspec as q


def main() -> int:
    x = q.simulate(q.NullModel.ar1(0.0, 0.5, 1.0), 512, 7)
    assert len(x) == 512 and all(math.isfinite(v) for v in x)

    est = q.estimate(x, window="bartlett", M=16)
    assert est.values.shape == (est.q, est.q, 512)
    # Hermitian in the quantile indices, conjugate-symmetric in frequency.
    v = est.values
    assert abs(v[2, 3, 5] - v[3, 2, 5].conjugate()) < 1e-12
    assert abs(v[2, 3, 5] - v[2, 3, 512 - 5].conjugate()) < 1e-12
    (lo, hi), _ = est.confidence_band(9, 9, 128, alpha=0.05)
    assert lo < v[9, 9, 128].real < hi

    rep = q.gof_test(x, q.NullModel.ar1(0.0, 0.5, 1.0), M=16, bootstrap=200, seed=3)
    assert rep["p_normal"] > 0.05 and rep["p_bootstrap"] > 0.05
    assert rep["z"] == (rep["statistic"] - rep["E_T"]) / math.sqrt(rep["V_T"])

    rep = q.gof_test(x, {"kind": "iid", "mu": 0.0, "sigma": 1.0}, M=16)
    assert rep["p_normal"] < 0.01  # AR(1) data is far from independence

    y = q.simulate(q.NullModel.ar1(0.0, 0.5, 1.0), 512, 99)
    rep = q.two_sample_test(x, y, M=16)
    assert rep["p_normal"] > 0.01

    rep = q.reversibility_test(x, M=16, bootstrap=200, seed=5)
    assert rep["p_bootstrap"] > 0.05  # AR(1) is time-reversible

    print("python smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
