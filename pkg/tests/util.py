"""Shared random-spec factories for the test sweeps.

All draws are seeded by the caller; specs are rejected and redrawn until the
spectral radius is inside the requested bound, so every spec is stationary
with margin.
"""

import numpy as np

import causalflow as cf


def random_noise_cov(rng, d, max_corr=0.8):
    sig = rng.uniform(0.5, 1.5, size=d)
    noise = np.diag(sig ** 2)
    for i in range(d):
        for j in range(i + 1, d):
            rho = rng.uniform(-max_corr, max_corr)
            noise[i, j] = noise[j, i] = rho * sig[i] * sig[j]
    # reject non-PD draws by shrinking the off-diagonal part
    while np.linalg.eigvalsh(noise).min() <= 1e-8:
        off = noise - np.diag(np.diag(noise))
        noise = np.diag(np.diag(noise)) + 0.5 * off
    return noise


def random_bivariate_spec(rng, max_radius=0.9, min_feedback=None,
                          no_feedback=False, no_instantaneous=False):
    while True:
        c = rng.uniform(-0.7, 0.7, size=4)  # cxx, cxy, cyx, cyy
        if no_feedback:
            c[2] = 0.0
        elif min_feedback is not None and abs(c[2]) < min_feedback:
            c[2] = min_feedback * np.sign(c[2] or 1.0)
        coupling = np.array([[c[0], c[2]],
                             [c[1], c[3]]])
        if np.max(np.abs(np.linalg.eigvals(coupling))) < max_radius:
            break
    sv, sw = rng.uniform(0.6, 1.4, size=2)
    rho = 0.0 if no_instantaneous else rng.uniform(-0.75, 0.75)
    noise = np.array([[sv ** 2, rho * sv * sw],
                      [rho * sv * sw, sw ** 2]])
    return cf.ARProcessSpec(("x", "y"), coupling, noise)


def random_trivariate_spec(rng, max_radius=0.75):
    while True:
        coupling = rng.uniform(-0.55, 0.55, size=(3, 3))
        if np.max(np.abs(np.linalg.eigvals(coupling))) < max_radius:
            break
    return cf.ARProcessSpec(("x", "y", "z"), coupling, random_noise_cov(rng, 3, 0.6))


def random_spd(rng, d, scale=1.0):
    m = rng.standard_normal((d, d))
    return scale * (m @ m.T + d * np.eye(d))
