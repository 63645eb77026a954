"""Tests für die ideale SB-Engine."""
import numpy as np
import pytest
from scipy import stats

from sb_ising.baselines import LocalSearchParams, local_search_best
from sb_ising.exceptions import DimensionError, ValidationError
from sb_ising.ising_core import CouplingMatrix, cut_size, random_graph
from sb_ising.sb_solver import (
    NegatedNoiseSource,
    NoiseKind,
    NoiseSchedule,
    RngNoiseSource,
    SbParams,
    TrialResult,
    derive_seed,
    detect_cycle,
    hyperbolic_decay,
    noise_sample,
    noise_vector,
    run_trial,
    run_trials,
    sb_step,
)

NO_NOISE = NoiseSchedule.disabled()


def _reference_trajectory(j, x0, alpha, beta, steps):
    """Geradlinige Auswertung von x' = sgn(α·x − β·J·x) ohne Rauschen."""
    x = [int(v) for v in x0]
    n = len(x)
    cuts = []
    for _ in range(steps):
        new = []
        for i in range(n):
            y = alpha * x[i] - beta * sum(int(j[i][m]) * x[m] for m in range(n))
            new.append(1 if y > 0 else -1 if y < 0 else x[i])
        x = new
        cuts.append(sum(
            1 for a in range(n) for b in range(a + 1, n) if j[a][b] and x[a] != x[b]
        ))
    return x, cuts


class TestParams:
    def test_defaults_valid(self):
        params = SbParams()
        assert params.alpha > 0 and params.beta > 0

    @pytest.mark.parametrize(
        "kwargs", [{"alpha": 0.0}, {"beta": -0.1}, {"iterations": 0}, {"seed": -1}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SbParams(**kwargs)

    def test_beta_zero_allowed(self):
        assert SbParams(beta=0.0).beta == 0.0

    def test_schedule_rejects_negative_amplitude(self):
        with pytest.raises(ValidationError):
            NoiseSchedule(amplitude0=-1.0)

    def test_schedule_kind_from_string(self):
        assert NoiseSchedule(kind="uniform-constant").kind is NoiseKind.CONSTANT


class TestNoise:
    def test_none_is_zero(self):
        rng = np.random.default_rng(0)
        assert all(noise_sample(NO_NOISE, k, rng) == 0.0 for k in range(20))

    def test_none_consumes_nothing(self):
        rng = np.random.default_rng(0)
        noise_vector(NO_NOISE, 0, rng, 10)
        assert rng.integers(0, 2**32) == np.random.default_rng(0).integers(0, 2**32)

    def test_negative_iteration(self):
        with pytest.raises(ValidationError):
            noise_sample(NoiseSchedule(), -1, np.random.default_rng(0))

    def test_constant_statistics(self):
        """10^5 Ziehungen: Mittel ≈ 0, |ζ| ≤ A, 32 Stufen gleichverteilt."""
        schedule = NoiseSchedule(kind=NoiseKind.CONSTANT, amplitude0=1.0, levels=16)
        values = noise_vector(schedule, 0, np.random.default_rng(42), 100_000)
        assert abs(values.mean()) < 0.02
        assert np.abs(values).max() <= 1.0

        signs, mags = RngNoiseSource(np.random.default_rng(43)).draw(100_000, 16)
        codes = (signs > 0) * 16 + mags
        observed = np.bincount(codes, minlength=32)
        assert stats.chisquare(observed).pvalue > 0.001

    def test_levels_are_quantized(self):
        schedule = NoiseSchedule(kind=NoiseKind.CONSTANT, amplitude0=1.5, levels=16)
        values = noise_vector(schedule, 0, np.random.default_rng(1), 5000)
        steps = values / (1.5 / 15)
        assert np.allclose(steps, np.round(steps))
        assert set(np.round(np.abs(steps)).astype(int)) <= set(range(16))

    def test_decaying_magnitude_drops(self):
        schedule = NoiseSchedule(kind=NoiseKind.DECAYING, amplitude0=1.0, decay_rate=0.25)
        early = np.abs(noise_vector(schedule, 0, np.random.default_rng(5), 10_000)).mean()
        late = np.abs(noise_vector(schedule, 10, np.random.default_rng(6), 10_000)).mean()
        assert schedule.amplitude(10) < schedule.amplitude(0)
        assert early > late

    def test_decaying_schedule_monotone(self):
        schedule = NoiseSchedule(kind=NoiseKind.DECAYING, amplitude0=2.0, decay_rate=0.25)
        amps = [schedule.amplitude(k) for k in range(4096)]
        assert all(a >= 0 for a in amps)
        assert all(b <= a for a, b in zip(amps, amps[1:]))

    def test_custom_decay(self):
        schedule = NoiseSchedule(amplitude0=1.0, decay=lambda k: 0.5**k)
        assert schedule.amplitude(3) == pytest.approx(0.125)

    def test_hyperbolic_decay(self):
        decay = hyperbolic_decay(0.25)
        assert decay(0) == 1.0
        assert decay(4) == pytest.approx(0.5)

    def test_single_level_is_zero(self):
        schedule = NoiseSchedule(kind=NoiseKind.CONSTANT, amplitude0=1.0, levels=1)
        assert not noise_vector(schedule, 0, np.random.default_rng(0), 10).any()

    def test_negated_source(self):
        plain = RngNoiseSource(np.random.default_rng(3)).draw(50, 16)
        negated = NegatedNoiseSource(RngNoiseSource(np.random.default_rng(3))).draw(50, 16)
        assert np.array_equal(plain[0], -negated[0])
        assert np.array_equal(plain[1], negated[1])


class TestSbStep:
    def test_beta_zero_is_identity(self, small_instance):
        params = SbParams(alpha=1.0, beta=0.0)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.choice([-1, 1], size=small_instance.n)
            out = sb_step(small_instance.coupling, x, params, NO_NOISE, 0, rng)
            assert np.array_equal(out, x)

    def test_k2_oscillates(self, k2):
        params = SbParams(alpha=0.5, beta=1.0)
        rng = np.random.default_rng(0)
        x1 = sb_step(k2.coupling, np.array([1, 1]), params, NO_NOISE, 0, rng)
        assert x1.tolist() == [-1, -1]
        x2 = sb_step(k2.coupling, x1, params, NO_NOISE, 1, rng)
        assert x2.tolist() == [1, 1]

    def test_tie_keeps_previous_spin(self, k2):
        """y = 1·x − 1·(J·x) = 0 bei x = (+1, +1): Spins bleiben."""
        params = SbParams(alpha=1.0, beta=1.0)
        out = sb_step(k2.coupling, np.array([1, 1]), params, NO_NOISE, 0, np.random.default_rng(0))
        assert out.tolist() == [1, 1]

    def test_matches_reference_script(self):
        inst = random_graph(8, 0.5, 31)
        params = SbParams(alpha=1.0, beta=0.4, iterations=20)
        x0 = np.random.default_rng(8).choice([-1, 1], size=8)
        result = run_trial(inst, params, NO_NOISE, 0, initial=x0)
        expected_x, expected_cuts = _reference_trajectory(
            inst.coupling.entries.tolist(), x0, 1.0, 0.4, 20
        )
        assert list(result.trajectory) == expected_cuts
        assert result.final_spins.tolist() == expected_x

    def test_permutation_commutes(self, small_instance):
        j = small_instance.coupling.entries
        perm = np.random.default_rng(2).permutation(small_instance.n)
        permuted = CouplingMatrix.from_dense(j[np.ix_(perm, perm)])
        params = SbParams(alpha=1.0, beta=0.5)
        x = np.random.default_rng(4).choice([-1, 1], size=small_instance.n)
        rng = np.random.default_rng(0)
        out = sb_step(small_instance.coupling, x, params, NO_NOISE, 0, rng)
        out_perm = sb_step(permuted, x[perm], params, NO_NOISE, 0, rng)
        assert np.array_equal(out[perm], out_perm)

    def test_dimension_mismatch(self, k3):
        with pytest.raises(DimensionError):
            sb_step(k3.coupling, np.array([1, 1]), SbParams(), NO_NOISE, 0, np.random.default_rng(0))


class TestRunTrial:
    def test_single_iteration(self, small_instance):
        result = run_trial(small_instance, SbParams(iterations=1), NoiseSchedule(), 5)
        assert len(result.trajectory) == 1
        assert result.best_iteration == 0

    def test_deterministic(self, small_instance):
        a = run_trial(small_instance, SbParams(), NoiseSchedule(), 77)
        b = run_trial(small_instance, SbParams(), NoiseSchedule(), 77)
        assert a == b

    def test_best_cut_invariants(self, small_instance):
        result = run_trial(small_instance, SbParams(iterations=30), NoiseSchedule(), 3)
        assert result.best_cut == max(result.trajectory)
        assert result.trajectory[result.best_iteration] == result.best_cut
        assert result.trajectory.index(result.best_cut) == result.best_iteration
        assert all(c <= small_instance.edge_count for c in result.trajectory)
        assert result.best_cut <= small_instance.best_known_cut
        assert cut_size(small_instance.coupling, result.best_spins) == result.best_cut
        assert cut_size(small_instance.coupling, result.final_spins) == result.trajectory[-1]

    def test_best_so_far_monotone(self, small_instance):
        result = run_trial(small_instance, SbParams(iterations=25), NoiseSchedule(), 9)
        best = result.best_so_far()
        assert np.all(np.diff(best) >= 0)
        assert best[-1] == result.best_cut

    def test_record_schema(self, small_instance):
        result = run_trial(small_instance, SbParams(iterations=3), NoiseSchedule(), 9)
        record = result.to_record("g000")
        assert set(record) == {
            "instance_id", "trial_seed", "trajectory", "best_cut", "best_iteration",
        }
        assert record["trial_seed"] == 9

    def test_noise_symmetry(self, small_instance):
        """Negierter Start und negierter Vorzeichenstrom ergeben negierte Zustände."""
        params = SbParams(iterations=20)
        schedule = NoiseSchedule()
        x0 = np.random.default_rng(1).choice([-1, 1], size=small_instance.n)
        a = run_trial(
            small_instance, params, schedule, 0,
            initial=x0, noise=RngNoiseSource(np.random.default_rng(99)),
        )
        b = run_trial(
            small_instance, params, schedule, 0,
            initial=-x0, noise=NegatedNoiseSource(RngNoiseSource(np.random.default_rng(99))),
        )
        assert a.trajectory == b.trajectory
        assert np.array_equal(a.final_spins, -b.final_spins)

    def test_results_are_immutable(self, small_instance):
        result = run_trial(small_instance, SbParams(iterations=2), NoiseSchedule(), 1)
        with pytest.raises(ValueError):
            result.final_spins[0] = 1

    def test_equality_sensitive_to_spins(self, small_instance):
        a = run_trial(small_instance, SbParams(iterations=2), NoiseSchedule(), 1)
        assert a != run_trial(small_instance, SbParams(iterations=3), NoiseSchedule(), 1)
        assert isinstance(a, TrialResult)


class TestRunTrials:
    def test_single_equals_run_trial(self, small_instance):
        params, schedule = SbParams(), NoiseSchedule()
        [only] = run_trials(small_instance, params, schedule, 1, 123)
        assert only == run_trial(small_instance, params, schedule, derive_seed(123, 0))

    def test_split_concatenates(self, small_instance):
        params, schedule = SbParams(iterations=10), NoiseSchedule()
        full = run_trials(small_instance, params, schedule, 100, 7)
        first = run_trials(small_instance, params, schedule, 50, 7)
        second = run_trials(small_instance, params, schedule, 50, 7, first_trial=50)
        assert full == first + second

    def test_zero_trials(self, small_instance):
        with pytest.raises(ValidationError):
            run_trials(small_instance, SbParams(), NoiseSchedule(), 0, 0)

    def test_derived_seeds_distinct(self):
        seeds = {derive_seed(0, t) for t in range(1000)}
        assert len(seeds) == 1000
        assert all(0 <= s < 2**64 for s in seeds)


class TestCycleDetection:
    def test_k2_period_two(self, k2):
        preamble, period = detect_cycle(k2.coupling, np.array([1, 1]), SbParams(alpha=0.5, beta=1.0))
        assert (preamble, period) == (0, 2)

    def test_fixed_point(self, k2):
        preamble, period = detect_cycle(k2.coupling, np.array([1, -1]), SbParams(alpha=1.0, beta=0.5))
        assert period == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_tiny_instances_become_periodic(self, seed):
        inst = random_graph(8, 0.5, seed)
        x0 = np.random.default_rng(seed).choice([-1, 1], size=8)
        preamble, period = detect_cycle(inst.coupling, x0, SbParams(alpha=1.0, beta=0.5))
        assert period >= 1
        assert preamble + period <= 2**8


class TestDefaultOperatingPoint:
    def test_defaults_beat_random_assignment(self):
        """n=60, Dichte 0.5: Standardpunkt klar über Zufallszuweisungen (≈ 0.83)."""
        inst = random_graph(60, 0.5, 2024)
        denominator = local_search_best(inst, LocalSearchParams(restarts=200)).best_cut
        trials = run_trials(inst, SbParams(), NoiseSchedule(), 30, 0)
        sb_accuracy = np.mean([t.best_cut for t in trials]) / denominator
        rng = np.random.default_rng(0)
        random_accuracy = np.mean([
            cut_size(inst.coupling, rng.choice([-1, 1], size=60)) for _ in range(200)
        ]) / denominator
        assert sb_accuracy >= 0.88
        assert sb_accuracy >= random_accuracy + 0.05
