import math

import numpy as np
import pytest

from fockmzi.elements import ONE_ARM
from fockmzi.estimation import (
    ModelMismatchError,
    NoPhaseInformationError,
    OutcomeHistogram,
    bayes_posterior,
    classical_fisher,
    ensemble_sensitivity,
    min_sensitivity,
    observable_noon_flip,
    output_distribution,
    phase_derivative,
    posterior_mean,
    posterior_std,
    sample_outcomes,
    scaling_fit,
    sensitivity,
    sensitivity_curve,
)
from fockmzi.fock import (
    BlockObservable,
    TwoModeState,
    apply,
    expectation,
    make_basis_state,
    number_observable,
    spectral_exponential,
)
from fockmzi.schemes import build_setup
from fockmzi.states import SchemeTag, noon


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


# ---------------------------------------------------------------- flip observable

def test_flip_observable_is_pauli_x_for_one_photon():
    mat = observable_noon_flip(1).blocks[1]
    assert np.allclose(mat, [[0, 1], [1, 0]], atol=0)


def test_flip_observable_has_two_entries_and_one_block():
    obs = observable_noon_flip(5)
    assert list(obs.blocks) == [5]
    assert np.count_nonzero(obs.blocks[5]) == 2


def test_flip_expectation_is_cos_n_phi():
    for n in (1, 3, 8, 20):
        obs = observable_noon_flip(n)
        for phi in np.linspace(0, 2 * math.pi, 50):
            val = expectation(obs, noon(n, phi, n))
            assert abs(val - math.cos(n * phi)) < 1e-12


def test_flip_squared_is_identity_on_its_span():
    n = 4
    mat = observable_noon_flip(n).blocks[n]
    sq = mat @ mat
    assert sq[0, 0] == 1.0 and sq[n, n] == 1.0
    assert np.count_nonzero(sq) == 2


# ---------------------------------------------------------------- sensitivity

def test_noon_sensitivity_is_exactly_one_over_n():
    for n in (1, 2, 7, 20):
        obs = observable_noon_flip(n)
        gen = number_observable("b", n)
        vals = []
        for phi in np.linspace(0.01, 3.1, 60):
            s = sensitivity(noon(n, phi, n), obs, gen)
            if math.isfinite(s):
                vals.append(s)
        assert vals, "grid produced no finite sensitivities"
        assert max(abs(v - 1 / n) for v in vals) < 1e-10
        assert max(vals) - min(vals) < 1e-9  # phase independence where finite


def test_single_qubit_sensitivity_is_one():
    obs = observable_noon_flip(1)
    gen = number_observable("b", 1)
    for phi in (0.2, 1.0, 2.5):
        assert sensitivity(noon(1, phi, 1), obs, gen) == pytest.approx(1.0, abs=1e-12)


def test_dual_fock_jz_sensitivity_diverges_everywhere():
    setup = build_setup(SchemeTag("dual-fock", 3))
    curve = sensitivity_curve(setup.analysis, setup.input_state, setup.observable, np.linspace(0.05, 3.1, 40))
    assert np.all(np.isinf(curve.delta_phi))
    with pytest.raises(NoPhaseInformationError):
        min_sensitivity(curve)


def test_commutator_derivative_matches_finite_difference():
    rng = np.random.default_rng(29)
    h = 1e-5
    for _ in range(25):
        n = int(rng.integers(1, 11))
        a = BlockObservable({n: random_hermitian(rng, n + 1)})
        g = BlockObservable({n: random_hermitian(rng, n + 1)})
        vec = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        state = TwoModeState(n, {n: vec / np.linalg.norm(vec)})
        exact = phase_derivative(state, a, g)
        plus = expectation(a, apply(spectral_exponential(g, h), state))
        minus = expectation(a, apply(spectral_exponential(g, -h), state))
        fd = (plus - minus) / (2 * h)
        assert abs(exact - fd) <= 1e-6 * (1 + abs(expectation(a, state)))


def test_sensitivity_curve_min_against_denser_grid():
    setup = build_setup(SchemeTag("yurke-bosonic", 4))
    coarse = sensitivity_curve(setup.analysis, setup.input_state, setup.observable,
                               np.linspace(0.005, math.pi - 0.005, 400))
    phi_star, best = min_sensitivity(coarse)
    assert math.isfinite(best)
    dense = sensitivity_curve(setup.analysis, setup.input_state, setup.observable,
                              np.linspace(0.005, math.pi - 0.005, 4000))
    _, best_dense = min_sensitivity(dense)
    assert best_dense <= best + 1e-12
    assert abs(best - best_dense) / best_dense < 1e-3


def test_coherent_min_sensitivity_hits_shot_noise():
    setup = build_setup(SchemeTag("coherent", 4))
    grid = np.linspace(0.1, math.pi - 0.1, 301)
    curve = sensitivity_curve(setup.analysis, setup.input_state, setup.observable, grid)
    _, best = min_sensitivity(curve)
    assert abs(best - 0.5) / 0.5 < 0.02
    # oracle: brute force at a much larger cutoff agrees
    brute = build_setup(SchemeTag("coherent", 4), cutoff=60)
    brute_curve = sensitivity_curve(brute.analysis, brute.input_state, brute.observable, grid)
    _, brute_best = min_sensitivity(brute_curve)
    assert abs(best - brute_best) < 1e-9


def test_sensitivity_curve_validation():
    from fockmzi.estimation import SensitivityCurve

    with pytest.raises(ValueError):
        SensitivityCurve(None, "jz", np.array([0.2, 0.1]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SensitivityCurve(None, "jz", np.array([0.1, 0.2]), np.array([1.0, -1.0]))
    SensitivityCurve(None, "jz", np.array([0.1, 0.2]), np.array([1.0, math.inf]))


def test_ensemble_sensitivity_values():
    assert ensemble_sensitivity(100, math.pi / 3) == pytest.approx(0.1, abs=1e-15)
    assert ensemble_sensitivity(1, 0.9) == 1.0
    assert math.isinf(ensemble_sensitivity(4, math.pi))
    with pytest.raises(ValueError):
        ensemble_sensitivity(0, 0.5)


# ---------------------------------------------------------------- Fisher information

def test_single_photon_fisher_is_one():
    setup = build_setup(SchemeTag("single-port-fock", 1))
    for phi in (0.4, 1.2, 2.0):
        assert classical_fisher(setup.sampling, setup.input_state, phi) == pytest.approx(1.0, abs=1e-7)


def test_noon_fisher_reaches_heisenberg_bound():
    # oracle: the readout produces the two-outcome distribution (1 +/- cos(N phi))/2
    for n in (2, 3, 5):
        setup = build_setup(SchemeTag("noon", n))
        for phi in (0.3, 0.9):
            dist = output_distribution(setup.sampling, setup.input_state, phi)
            nonzero = {k: v for k, v in dist.items() if v > 1e-12}
            assert set(nonzero) == {(n, 0), (0, n)}
            assert nonzero[(n, 0)] == pytest.approx((1 + math.cos(n * phi)) / 2, abs=1e-12)
            f = classical_fisher(setup.sampling, setup.input_state, phi)
            assert f == pytest.approx(n**2, rel=1e-6)
            assert f <= n**2 * (1 + 1e-6)


def test_dual_fock_fisher_scaling_exponent():
    points = []
    for n in range(2, 13):
        setup = build_setup(SchemeTag("dual-fock", n))
        best = max(classical_fisher(setup.sampling, setup.input_state, phi)
                   for phi in np.linspace(0.05, math.pi / 2, 20))
        points.append((n, best))
    slope, _ = scaling_fit(points)
    assert 1.7 <= slope <= 2.3


def test_cramer_rao_bound_holds():
    cases = [
        ("single-port-fock", 1), ("single-port-fock", 3), ("coherent", 1),
        ("yurke-fermionic-analog", 3), ("yurke-bosonic", 4), ("noon", 4),
    ]
    for name, n in cases:
        setup = build_setup(SchemeTag(name, n))
        gen = setup.analysis.output_generator(setup.cutoff)
        for phi in (0.3, 0.8, 1.4):
            fisher = classical_fisher(setup.sampling, setup.input_state, phi)
            if fisher <= 0:
                continue
            evolved = setup.analysis.evolve(setup.input_state, phi)
            dphi = sensitivity(evolved, setup.observable, gen)
            assert dphi >= 1 / math.sqrt(fisher) - 1e-9


# ---------------------------------------------------------------- sampling

def test_sample_counts_sum_to_shots():
    setup = build_setup(SchemeTag("single-port-fock", 3))
    hist = sample_outcomes(setup.sampling, setup.input_state, 0.7, 1000, seed=42)
    assert sum(hist.counts.values()) == 1000


def test_sampling_is_deterministic_per_seed():
    setup = build_setup(SchemeTag("dual-fock", 2))
    a = sample_outcomes(setup.sampling, setup.input_state, 0.9, 5000, seed=123)
    b = sample_outcomes(setup.sampling, setup.input_state, 0.9, 5000, seed=123)
    c = sample_outcomes(setup.sampling, setup.input_state, 0.9, 5000, seed=124)
    assert a.counts == b.counts
    assert a.counts != c.counts


def test_negative_seed_is_accepted():
    setup = build_setup(SchemeTag("noon", 2))
    hist = sample_outcomes(setup.sampling, setup.input_state, 0.4, 100, seed=-7)
    assert sum(hist.counts.values()) == 100


def test_hom_interference_null_never_fires():
    from fockmzi.elements import BALANCED, InterferometerPipeline, PhaseSlot, SplitterStage

    pipeline = InterferometerPipeline((PhaseSlot(ONE_ARM), SplitterStage(BALANCED)))
    twin = make_basis_state(1, 1, 2)
    for seed in range(5):
        hist = sample_outcomes(pipeline, twin, 0.0, 2000, seed=seed)
        assert hist.counts.get((1, 1), 0) == 0


def test_empirical_binomial_within_four_sigma():
    from fockmzi.elements import BALANCED, InterferometerPipeline, PhaseSlot, SplitterStage

    n, shots = 6, 100_000
    pipeline = InterferometerPipeline((PhaseSlot(ONE_ARM), SplitterStage(BALANCED)))
    hist = sample_outcomes(pipeline, make_basis_state(n, 0, n), 0.0, shots, seed=2024)
    for k in range(n + 1):
        p = math.comb(n, k) / 2**n
        sigma = math.sqrt(shots * p * (1 - p))
        observed = hist.counts.get((k, n - k), 0)
        assert abs(observed - shots * p) < 4 * sigma


# ---------------------------------------------------------------- Bayes

def test_zero_shots_gives_uniform_posterior():
    setup = build_setup(SchemeTag("noon", 2))
    hist = OutcomeHistogram(phi_true=0.3, shots=0, counts={}, seed=0)
    grid = np.linspace(0.0, setup.likelihood_period, 128, endpoint=False)
    post = bayes_posterior(hist, setup.sampling, setup.input_state, grid)
    assert np.allclose(post.weights, 1.0 / 128, atol=1e-15)


def test_posterior_matches_direct_bernoulli_grid():
    # oracle: likelihood p^k q^(m-k) evaluated directly on the grid
    n, phi_true, shots, seed = 2, 0.3, 400, 5
    setup = build_setup(SchemeTag("noon", n))
    hist = sample_outcomes(setup.sampling, setup.input_state, phi_true, shots, seed)
    grid = np.linspace(0.0, setup.likelihood_period, 256, endpoint=False)
    post = bayes_posterior(hist, setup.sampling, setup.input_state, grid)

    k_top = hist.counts.get((n, 0), 0)
    k_bot = hist.counts.get((0, n), 0)
    p = (1 + np.cos(n * grid)) / 2
    direct = p**k_top * (1 - p) ** k_bot
    direct /= direct.sum()
    assert np.max(np.abs(post.weights - direct)) < 1e-12


def test_noon_posterior_concentrates_modulo_mirror():
    n, phi_true = 3, 0.35
    setup = build_setup(SchemeTag("noon", n))
    hist = sample_outcomes(setup.sampling, setup.input_state, phi_true, 3000, seed=9)
    period = setup.likelihood_period
    grid = np.linspace(0.0, period, 2048, endpoint=False)
    post = bayes_posterior(hist, setup.sampling, setup.input_state, grid)
    mirror = period - phi_true
    near = sum(
        w for phi, w in zip(post.phi_grid, post.weights)
        if min(abs(phi - phi_true), abs(phi - mirror)) < 0.05
    )
    assert near > 0.99


def test_dual_fock_posterior_std_scaling():
    points = []
    for n in range(2, 11):
        setup = build_setup(SchemeTag("dual-fock", n))
        hist = sample_outcomes(setup.sampling, setup.input_state, 0.7, 300, seed=11 + n)
        grid = np.linspace(0.02, math.pi / 2 - 0.02, 512)  # one monotonic branch
        post = bayes_posterior(hist, setup.sampling, setup.input_state, grid)
        points.append((n, posterior_std(post)))
    slope, _ = scaling_fit(points)
    assert -1.3 <= slope <= -0.7


def test_impossible_data_raises_model_mismatch():
    setup = build_setup(SchemeTag("noon", 2))
    bogus = OutcomeHistogram(phi_true=0.2, shots=5, counts={(1, 1): 5}, seed=0)
    grid = np.linspace(0.0, setup.likelihood_period, 64, endpoint=False)
    with pytest.raises(ModelMismatchError):
        bayes_posterior(bogus, setup.sampling, setup.input_state, grid)


def test_posterior_mean_wraps_across_period_seam():
    from fockmzi.estimation import PosteriorDistribution

    grid = np.linspace(0.0, 1.0, 200, endpoint=False)
    weights = np.exp(-0.5 * ((np.minimum(grid, 1.0 - grid)) / 0.02) ** 2)
    weights /= weights.sum()
    post = PosteriorDistribution(grid, weights)
    mean = posterior_mean(post)
    assert min(abs(mean - 0.0), abs(mean - 1.0)) < 0.01
    assert posterior_std(post) < 0.05  # wrap-safe, not ~0.5


# ---------------------------------------------------------------- scaling fit

def test_scaling_fit_recovers_exact_powers():
    ns = range(1, 15)
    slope, intercept = scaling_fit([(n, 1 / math.sqrt(n)) for n in ns])
    assert abs(slope + 0.5) < 1e-12
    assert abs(intercept) < 1e-12
    slope, _ = scaling_fit([(n, 1.0 / n) for n in ns])
    assert abs(slope + 1.0) < 1e-12


def test_scaling_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        scaling_fit([(1, 1.0), (2, 0.5)])
    with pytest.raises(ValueError):
        scaling_fit([(1, 1.0), (2, -0.5), (3, 0.2)])


def test_yurke_min_sensitivity_scaling_band():
    for name, sizes in (("yurke-fermionic-analog", range(3, 14, 2)),
                        ("yurke-bosonic", range(4, 13, 2))):
        points = []
        for n in sizes:
            setup = build_setup(SchemeTag(name, n))
            curve = sensitivity_curve(setup.analysis, setup.input_state, setup.observable,
                                      np.linspace(0.005, math.pi - 0.005, 800))
            points.append((n, min_sensitivity(curve)[1]))
        slope, _ = scaling_fit(points)
        assert -1.2 <= slope <= -0.8


def test_noon_framings_agree():
    for n in (2, 5):
        post_bs = build_setup(SchemeTag("noon", n), noon_framing="post-bs")
        at_input = build_setup(SchemeTag("noon", n), noon_framing="input")
        grid = np.linspace(0.05, 3.0, 30)
        a = sensitivity_curve(post_bs.analysis, post_bs.input_state, post_bs.observable, grid)
        b = sensitivity_curve(at_input.analysis, at_input.input_state, at_input.observable, grid)
        finite = np.isfinite(a.delta_phi) & np.isfinite(b.delta_phi)
        assert finite.any()
        assert np.max(np.abs(a.delta_phi[finite] - b.delta_phi[finite])) < 1e-9
