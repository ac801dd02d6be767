"""Shared fixtures: the defocusing-cubic reference experiment, scaled-down
variants, and the randomized decisive-parameter sampler."""

import math

import numpy as np
import pytest

import kgplane as kg
from kgplane.spectral import STABLE, UNSTABLE


def random_parameter_sets(count, seed=42, margin=0.1):
    """Plane waves with decisive closed-form verdicts (inequality margins
    >= `margin`), drawn from moderate ranges where sideband growth rates are
    numerically resolvable."""
    rng = np.random.RandomState(seed)
    sets = []
    while len(sets) < count:
        c0 = rng.uniform(-2.0, 2.0)
        c1 = rng.uniform(-1.5, 1.5)
        f = kg.Nonlinearity((float(c0), float(c1)))
        asq = rng.uniform(0.3, 4.0)
        k = float(rng.choice([0.0, 0.5, -0.5, 1.0, -1.0, 1.5]))
        fa = f(asq)
        q = asq * f.derivative(asq)
        if abs(fa) < margin:
            continue
        if fa > 0:
            if q >= margin:
                verdict = STABLE
            elif -2.0 * fa + margin <= q <= -margin:
                verdict = UNSTABLE
            else:
                continue
        else:
            if q >= -2.0 * fa + margin:
                verdict = STABLE
            elif margin <= q <= -2.0 * fa - margin:
                verdict = UNSTABLE
            else:
                continue
        try:
            pw = kg.close_dispersion(math.sqrt(asq), k, f)
        except kg.NegativeRadicand:
            continue
        if pw.k == 0.0 and pw.omega == 0.0:
            continue
        sets.append((pw, f, verdict))
    return sets


@pytest.fixture(scope="session")
def param_sampler():
    return random_parameter_sets


@pytest.fixture(scope="session")
def reference():
    """Reference experiment parameters: f = 1 + nu, omega = 10, k = 2 pi,
    a^2 = 99 - 4 pi^2, Gaussian perturbations on a 20-unit periodic domain."""
    f = kg.Nonlinearity.cubic_defocusing()
    pw = kg.amplitude_from_dispersion(k=2.0 * math.pi, omega=10.0, f=f)
    return {
        "f": f,
        "pw": pw,
        "pm": kg.PhaseModulation.zero(),
        "pert": kg.Perturbation(w0_amp=4 + 4j, v0_amp=40 + 40j,
                                width=25.0, center=10.0),
        "grid": kg.PeriodicGrid(length=20.0, n=2048),
        "window_center": 10.0,
        "window_radius": 5.0,
    }


@pytest.fixture(scope="session")
def short_run(reference):
    """Coarse, short reference run (n = 512, dt = 1e-3, t_end = 1) for tests
    that need realistic dynamics without the full-resolution cost."""
    r = reference
    grid = kg.PeriodicGrid(length=20.0, n=512)
    cfg = kg.SplitConfig.for_wave(r["pw"], r["f"], dt=1e-3, t_end=1.0,
                                  sample_every=20)
    result = kg.run_simulation(grid, r["pw"], r["f"], r["pm"], r["pert"], cfg,
                               window_center=10.0, window_radius=5.0)
    return {"grid": grid, "cfg": cfg, "result": result, **r}
