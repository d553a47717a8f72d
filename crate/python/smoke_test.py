"""Smoke test for the decaylab Python extension.

Build and install with

    pip install --no-build-isolation -e crates/python

then run ``python python/smoke_test.py``.
"""

import csv
import io
import json
import math

import decaylab_py as dl


def close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def main():
    grid = dl.Grid(16, 4 * math.pi)
    assert grid.n == 16 and close(grid.spacing, 0.5, 1e-15)

    u = dl.SpectralField.synthesize(0.0, grid, seed=3, amplitude=0.05).dealias()
    assert close(u.sobolev_norm_sq(0.5), 0.05**2, 1e-3)
    assert u.divergence_defect() < 1e-12

    # heat flow with rotation damps every Sobolev norm
    ut = dl.semigroup_apply(u, 0.5, omega=10.0)
    assert ut.sobolev_norm_sq(0.5) < u.sobolev_norm_sq(0.5)

    # Coriolis term is orthogonal to the field
    c = dl.coriolis_term(u)
    assert abs(c.sobolev_inner(u, 0.0)) <= 1e-12 * u.sobolev_norm_sq(0.0)

    # Picard iteration and the time stepper agree
    v = u
    for _ in range(32):
        v = dl.step(v, 0.25 / 32, omega=1.0)
    picard, distances = dl.picard_solve(u, 0.25, 20, 32, omega=1.0)
    gap = (picard - v).sobolev_norm_sq(0.5) / v.sobolev_norm_sq(0.5)
    assert math.sqrt(gap) < 1e-6, gap

    # decay characters of lattice fields and profiles
    est = json.loads(dl.profile_decay_character('{"family": "power_gauss", "r_star": 0.5}'))
    assert close(est["r_star"], 0.5, 1e-3)
    big = dl.SpectralField.synthesize(1.0, dl.Grid(64, 64 * math.pi), seed=1)
    assert abs(json.loads(dl.estimate_decay_character(big))["r_star"] - 1.0) < 0.1

    # continuum heat-flow rates
    spec = '{"family": "power_gauss", "r_star": 0}'
    ts = [10 * 1000 ** (k / 31) for k in range(32)]
    ys = [dl.continuum_linear_norm(spec, 0.5, t) for t in ts]
    beta, r2 = dl.fit_power_law(ts, ys, 10.0, 1e4)
    assert close(beta, 2.0, 1e-6) and r2 > 0.999999

    # a short solver run
    config = {
        "grid": {"n": 16, "box_length": 4 * math.pi},
        "dt": 0.01,
        "t_final": 0.2,
        "record_interval": 0.02,
        "epsilon_budget": 0.05,
    }
    rows = list(csv.DictReader(io.StringIO(dl.run_simulation(json.dumps(config), u))))
    assert len(rows) == 11
    norms = [float(r["hhalf_sq"]) for r in rows]
    assert all(b <= a * (1 + 1e-8) for a, b in zip(norms, norms[1:]))

    ratio = dl.bilinear_ratio(u)
    assert close(dl.bilinear_ratio(u.scaled(3.0)), ratio, 1e-12)
    assert close(dl.splitting_radius(1.0), 1.0, 1e-15)

    try:
        dl.Grid(7, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("odd grid accepted")

    print("decaylab python smoke test: ok")


if __name__ == "__main__":
    main()
