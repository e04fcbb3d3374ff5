import numpy as np
import pytest

from conftest import (
    REFERENCE_COUPLING,
    RING_COUPLING,
    TWO_MODE_COUPLING,
    random_params,
    random_symmetric_coupling,
    six_mode_params,
    six_mode_table,
)
from mvmtorus import (
    MvmParams,
    PointKind,
    SearchConfig,
    TorusPoint,
    Verdict,
    certify_unimodal,
    classify_critical,
    critical_points,
    grad_f,
)
from mvmtorus.modes import deduplicate

TWO_PI = 2.0 * np.pi


def _params(kappa, lam, mu=None):
    kappa = np.asarray(kappa, dtype=float)
    mu = np.zeros(kappa.size) if mu is None else np.asarray(mu)
    return MvmParams(mu=mu, kappa=kappa, lam=lam)


# ---------------------------------------------------------------------------
# certification


def test_certify_definite_but_not_dominant():
    cert = certify_unimodal(_params([3.0, 3.0, 3.0], REFERENCE_COUPLING))
    assert cert.prop1_holds
    assert not cert.cor1_holds  # 3 < 4 = |−2| + |2|
    assert cert.verdict is Verdict.CERTIFIED_UNIMODAL
    assert cert.p_eigenvalues == pytest.approx([1.0, 1.0, 7.0], abs=1e-10)


def test_certify_dominant_rows():
    cert = certify_unimodal(_params([5.0, 5.0, 5.0], REFERENCE_COUPLING))
    assert cert.cor1_holds  # 5 > 4
    assert cert.prop1_holds
    assert cert.verdict is Verdict.CERTIFIED_UNIMODAL_WITH_MINIMUM


def test_certify_zero_concentration_is_inconclusive():
    cert = certify_unimodal(_params([0.0, 0.0, 0.0], RING_COUPLING))
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert not cert.prop1_holds


def test_certificate_dominance_implies_definiteness(rng):
    for _ in range(200):
        p = int(rng.integers(1, 5))
        params = random_params(rng, p)
        cert = certify_unimodal(params)
        if cert.cor1_holds:
            assert cert.prop1_holds
        expected = (
            Verdict.CERTIFIED_UNIMODAL_WITH_MINIMUM
            if cert.cor1_holds
            else Verdict.CERTIFIED_UNIMODAL
            if cert.prop1_holds
            else Verdict.INCONCLUSIVE
        )
        assert cert.verdict is expected


# ---------------------------------------------------------------------------
# classification


def test_classify_mean_under_definite_p():
    params = _params([3.0, 3.0, 3.0], REFERENCE_COUPLING)
    point = classify_critical(params, params.mu)
    assert point.kind is PointKind.MAXIMUM
    assert point.f_value == pytest.approx(9.0)


def test_classify_six_mode_maximum_spectrum():
    eta = 0.1
    eps = np.sin(eta)
    params = six_mode_params(eta)
    theta, _ = six_mode_table(eta)[0]
    point = classify_critical(params, TorusPoint(theta))
    assert point.kind is PointKind.MAXIMUM
    assert point.hessian_eigenvalues == pytest.approx(
        [-1.0, -1.0, -eps], abs=5.0 * eps * eps
    )


def test_classify_ridge_points_degenerate():
    # the flat ridge of the ring coupling runs along cube edges; the piece
    # with s_1 = s_3 = 1 is {theta : theta_1 = theta_3 = pi/2}, on which
    # the exponent is identically 1 (verified by the grid scan below)
    params = _params([0.0, 0.0, 0.0], RING_COUPLING)
    from mvmtorus import exponent_many

    t2 = np.linspace(0.0, TWO_PI, 64, endpoint=False)
    ridge = np.stack([np.full(64, np.pi / 2), t2, np.full(64, np.pi / 2)], axis=-1)
    values = exponent_many(params, ridge)
    assert np.max(np.abs(values - 1.0)) < 1e-14
    for t in (0.0, 0.7, 2.0, 4.5):
        point = classify_critical(params, TorusPoint(np.array([np.pi / 2, t, np.pi / 2])))
        assert point.kind is PointKind.DEGENERATE


def test_classify_rejects_noncritical_point():
    params = _params([3.0, 3.0, 3.0], REFERENCE_COUPLING)
    with pytest.raises(ValueError, match="not critical"):
        classify_critical(params, TorusPoint(np.array([1.0, 2.0, 3.0])))


# ---------------------------------------------------------------------------
# mode search: the three benchmark couplings


def test_search_two_mode_coupling():
    mu = np.array([0.4, 1.3, 5.2])
    report = critical_points(_params([0.0, 0.0, 0.0], TWO_MODE_COUPLING, mu=mu))
    assert report.n_maxima == 2
    assert not report.extended_mode_suspected
    targets = [mu + np.pi / 2.0, mu + 3.0 * np.pi / 2.0]
    for target in targets:
        assert any(
            m.theta.distance(TorusPoint(target)) < 1e-6 for m in report.maxima
        )
    for m in report.maxima:
        s = np.sin(m.theta.angles - mu)
        assert np.max(np.abs(np.abs(s) - 1.0)) < 1e-6
        assert m.f_value == pytest.approx(2.58, abs=1e-9)


@pytest.mark.parametrize("eta", [0.05, 0.1])
def test_search_six_mode_coupling(eta):
    report = critical_points(six_mode_params(eta))
    assert report.n_maxima == 6
    located = report.maxima
    for target, _ in six_mode_table(eta):
        matches = [
            m for m in located if m.theta.distance(TorusPoint(target)) < 1e-6
        ]
        assert len(matches) == 1


def test_search_ring_coupling_flags_extended_mode():
    report = critical_points(_params([0.0, 0.0, 0.0], RING_COUPLING))
    assert report.extended_mode_suspected
    ridge = report.degenerate
    assert len(ridge) >= 20
    values = np.array([c.f_value for c in ridge])
    assert np.max(values) - np.min(values) < 1e-9
    assert np.max(np.abs(values - 1.0)) < 1e-9


def test_search_dominant_rows_yields_max_min_saddles():
    mu = np.array([0.3, 5.9, 2.2])
    params = _params([5.0, 5.0, 5.0], REFERENCE_COUPLING, mu=mu)
    report = critical_points(params)
    assert report.n_maxima == 1
    assert len(report.minima) == 1
    assert report.maxima[0].theta.distance(params.mu) < 1e-8
    assert report.minima[0].theta.distance(params.mu.antipode()) < 1e-8
    others = [
        c
        for c in report.criticals
        if c.kind not in (PointKind.MAXIMUM, PointKind.MINIMUM)
    ]
    assert all(c.kind is PointKind.SADDLE for c in others)


# ---------------------------------------------------------------------------
# consistency properties


def test_certified_implies_single_maximum_at_mean(rng):
    checked = 0
    for _ in range(25):
        p = int(rng.integers(2, 4))
        params = random_params(rng, p, kappa_range=(0.5, 5.0), coupling_scale=1.5)
        cert = certify_unimodal(params)
        if not cert.prop1_holds:
            continue
        checked += 1
        report = critical_points(params)
        assert report.n_maxima == 1
        assert report.maxima[0].theta.distance(params.mu) < 1e-8
        if cert.cor1_holds:
            assert len(report.minima) == 1
            assert report.minima[0].theta.distance(params.mu.antipode()) < 1e-8
    assert checked >= 5


def test_zero_concentration_maxima_come_in_antipodal_pairs(rng):
    checked = 0
    for _ in range(10):
        lam = random_symmetric_coupling(rng, 3, scale=1.5)
        if np.max(np.abs(lam)) < 1e-9:
            continue
        report = critical_points(_params([0.0, 0.0, 0.0], lam))
        maxima = report.maxima
        if not maxima:
            continue  # purely degenerate landscapes carry no isolated maxima
        checked += 1
        assert report.n_maxima % 2 == 0
        for m in maxima:
            partner = m.theta.antipode()
            assert any(
                other.theta.distance(partner) < 1e-4 for other in maxima
            )
    assert checked >= 5


def test_reported_points_recheck_gradient(rng):
    params = random_params(rng, 3, kappa_range=(0.5, 4.0))
    cfg = SearchConfig()
    report = critical_points(params, cfg)
    assert report.criticals
    for c in report.criticals:
        fresh = np.max(np.abs(grad_f(params, c.theta)))
        assert fresh < cfg.grad_tol


def test_deduplication_is_idempotent():
    report = critical_points(_params([0.0, 0.0, 0.0], RING_COUPLING))
    once = deduplicate(report.criticals, 1e-4)
    twice = deduplicate(once, 1e-4)
    assert [c.theta for c in once] == [c.theta for c in twice]
    assert len(once) == len(report.criticals)  # report is already deduplicated


def test_report_counts_match_contents(rng):
    params = random_params(rng, 3, kappa_range=(0.0, 3.0))
    report = critical_points(params)
    n_max = sum(1 for c in report.criticals if c.kind is PointKind.MAXIMUM)
    assert report.n_maxima == n_max
    assert report.extended_mode_suspected == any(
        c.kind is PointKind.DEGENERATE for c in report.criticals
    )


def test_search_is_deterministic():
    params = six_mode_params(0.05)
    a = critical_points(params, SearchConfig(seed=7))
    b = critical_points(params, SearchConfig(seed=7))
    assert len(a.criticals) == len(b.criticals)
    for ca, cb in zip(a.criticals, b.criticals):
        assert np.array_equal(ca.theta.angles, cb.theta.angles)
        assert ca.f_value == cb.f_value
        assert ca.kind is cb.kind
