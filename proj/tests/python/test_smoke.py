import math

import pytest

import gibbslik as gl


@pytest.fixture
def square():
    return gl.Window([0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def quad(square):
    return gl.build_quadrature(square, 24)


def test_window_and_pattern(square):
    assert square.dim == 2
    assert square.measure() == pytest.approx(1.0)
    assert square.contains([0.5, 0.5])
    assert not square.contains([1.5, 0.5])

    x = gl.PointPattern([[0.1, 0.2], [0.7, 0.8]])
    assert len(x) == 2
    assert x.dim == 2
    assert x.point(1) == pytest.approx([0.7, 0.8])
    x.push_back([0.4, 0.4])
    assert len(x) == 3
    assert gl.has_duplicate_points(x) is False
    assert gl.min_pairwise_distance(x) == pytest.approx(
        min(
            math.dist(a, b)
            for i, a in enumerate(x.points())
            for b in x.points()[i + 1 :]
        )
    )


def test_poisson_likelihood_matches_closed_form(quad):
    # Poisson(beta): log density of x is n log(beta) - beta |W| under the
    # unit-rate reference measure.
    m = gl.Model.poisson(50.0)
    x = gl.PointPattern([[0.25, 0.25], [0.75, 0.75], [0.5, 0.1]])
    got = gl.exact_log_likelihood(m, x, quad)
    want = 3 * math.log(50.0) - 50.0 * 1.0
    assert got == pytest.approx(want, abs=1e-9)
    assert gl.conjectured_log_partition(m, quad) == pytest.approx(50.0, abs=1e-9)


def test_cond_intensity_hard_core():
    m = gl.Model.hard_core(10.0, 0.2)
    x = gl.PointPattern([[0.5, 0.5]])
    assert gl.cond_intensity(m, [0.5, 0.55], x) == 0.0
    assert gl.cond_intensity(m, [0.9, 0.9], x) == pytest.approx(10.0)
    assert gl.local_stability_bound(m) == pytest.approx(10.0)


def test_model_json_roundtrip():
    m = gl.Model.strauss(40.0, 0.5, 0.08)
    m2 = gl.model_from_json(gl.model_to_json(m))
    assert m2.family == "strauss"
    assert m2.beta == pytest.approx(40.0)
    assert m2.gamma == pytest.approx(0.5)
    assert m2.R == pytest.approx(0.08)


def test_discrete_oracle_roundtrip():
    sites = gl.PointPattern([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    sp = gl.DiscreteSpace.from_sites(sites)
    m = gl.Model.strauss(2.0, 0.5, 1.2)
    e = gl.enumerate_exact(sp, m)
    assert e.k == 3
    probs = [math.exp(e.log_probability(mask)) for mask in range(2**e.k)]
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    # empty configuration mass equals the reciprocal normalizer
    assert e.log_void == pytest.approx(-e.log_normalizer)

    rep = gl.conjecture_report(sp, m)
    assert rep.entry("void_exact") == pytest.approx(math.exp(e.log_void))
    names = [ent.name for ent in rep.entries]
    assert "void_conjectured" in names
    assert "log_partition_exact" in names


def test_mcmc_void_agrees_with_conjecture(square, quad):
    m = gl.Model.poisson(3.0)
    cfg = gl.MCMCConfig()
    cfg.steps = 20000
    cfg.burn_in = 2000
    cfg.thin = 10
    cfg.seed = 7
    s = gl.sample_gibbs(m, square, cfg)
    assert len(s) == cfg.samples_per_chain()

    box = gl.Window([0.0, 0.0], [0.5, 0.5])
    est = gl.estimate_void(s, box)
    truth = math.exp(gl.conjectured_log_void_box(m, quad, box))
    assert abs(est.mean - truth) < 5 * est.se + 0.02

    # deleting every point independently with probability c has expectation
    # exp(-beta * c * |W|) under Poisson(beta)
    gf = gl.estimate_generating_functional(s, lambda u: 0.2)
    assert abs(gf.mean - math.exp(-3.0 * 0.2)) < 5 * gf.se + 0.02


def test_mle_fit_recovers_poisson_rate(square, quad):
    s = gl.sample_poisson(gl.Model.poisson(60.0), square, 1, seed=11)
    x = s.samples[0]
    fit = gl.mle_fit("poisson", x, quad, objective="exact")
    assert fit.converged
    # unit window: the exact Poisson likelihood peaks at beta = n
    assert fit.model.beta == pytest.approx(len(x), rel=1e-4)
    assert fit.void_mode == "conjecture"


def test_posterior_grid_normalizes(quad):
    x = gl.PointPattern([[0.2, 0.3], [0.6, 0.7], [0.8, 0.2], [0.4, 0.9]])
    axes = [gl.GridAxis("beta", 0.5, 20.0, 60)]
    grid = gl.posterior_grid(gl.Model.poisson(4.0), x, quad, lambda t: 0.0, axes)
    assert sum(grid.cell_probability) == pytest.approx(1.0, abs=1e-9)
    assert math.isfinite(grid.log_evidence)


def test_ising_field_roundtrip():
    lat = gl.Lattice.grid(3, 3)
    assert lat.size == 9
    th = gl.IsingParams(0.2, 0.1)
    field = [1, 0, 1, 0, 1, 0, 1, 0, 1]
    exact = gl.field_exact_log_likelihood(lat, field, th)
    conj = gl.field_conjectured_log_likelihood(lat, field, th)
    assert math.isfinite(exact) and math.isfinite(conj)

    # independent sites: exact likelihood is Bernoulli, conjectured form
    # replaces the log-partition term by k*p
    th0 = gl.IsingParams(0.4, 0.0)
    p = 1.0 / (1.0 + math.exp(-0.4))
    n = sum(field)
    k = lat.size
    assert gl.field_exact_log_likelihood(lat, field, th0) == pytest.approx(
        n * math.log(p) + (k - n) * math.log1p(-p), abs=1e-10
    )
    assert gl.field_conjectured_log_likelihood(lat, field, th0) == pytest.approx(
        n * math.log(p) - k * p, abs=1e-10
    )
    rep = gl.field_conjecture_report(lat, th0)
    assert rep.entry("independence_identity_residual") == pytest.approx(0.0, abs=1e-10)

    dist = gl.field_distribution(lat, th)
    assert sum(dist) == pytest.approx(1.0, abs=1e-12)

    cfg = gl.FieldSimConfig()
    cfg.sweeps = 200
    cfg.burn_in = 20
    cfg.seed = 5
    draws = gl.gibbs_sample_field(lat, th, cfg)
    assert len(draws) == (cfg.sweeps - cfg.burn_in) // cfg.thin
    assert all(len(f) == 9 for f in draws)

    fit = gl.field_fit(lat, field, objective="pseudo")
    assert fit.converged
    assert math.isfinite(fit.theta_hat.theta1)
    assert math.isfinite(fit.theta_hat.theta2)


def test_enumeration_guard():
    big = gl.DiscreteSpace.grid(5, 5)
    with pytest.raises(gl.EnumerationLimitError):
        gl.enumerate_exact(big, gl.Model.poisson(1.0))


def test_implied_retention(square):
    m = gl.Model.strauss(30.0, 0.5, 0.05)
    cfg = gl.MCMCConfig()
    cfg.steps = 24000
    cfg.burn_in = 2000
    cfg.thin = 10
    cfg.seed = 13
    s = gl.sample_gibbs(m, square, cfg)
    cells = gl.implied_retention(s, 30.0, 3)
    assert len(cells) == 9
    ok = [c for c in cells if c.status == "ok"]
    assert ok, "at least one cell should yield an estimate"
    for c in ok:
        assert 0.0 < c.p_hat <= 1.5
