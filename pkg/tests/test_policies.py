"""Arm posteriors, Thompson selection, fractional updates, baselines."""

import random

import pytest

from jitai.domain import ActivityContext
from jitai.policies import (
    ArmPosterior,
    BanditBank,
    PolicyError,
    PolicyKind,
    PolicySpec,
    baseline_select,
    beta_draw,
    init_bandit,
    select_arm,
    thompson_select,
    update_posterior,
)


class TestInitBandit:
    def test_symmetric_prior_at_strength_two(self, priors):
        # p = 0.5 is not in the shipped table, so build a tiny matrix by hand
        from jitai.domain import PriorEntry, PriorMatrix, load_catalog

        catalog = load_catalog()
        entries = {
            (ActivityContext.RELAXING, iid): PriorEntry(probability=0.5, excluded=False)
            for iid in catalog.ids
        }
        m = PriorMatrix(entries, catalog)
        arms = init_bandit(m, ActivityContext.RELAXING, strength=2)
        assert all(p.alpha == 1.0 and p.beta == 1.0 for p in arms.values())

    def test_informed_from_table_value(self, priors):
        arms = init_bandit(priors, ActivityContext.ATTENDING_LECTURE, strength=19)
        post = arms["breathing_exercise"]  # table value 0.842
        assert post.alpha == pytest.approx(15.998)
        assert post.beta == pytest.approx(3.002)

    def test_informed_near_certain_prior(self):
        from jitai.domain import PriorEntry, PriorMatrix, load_catalog

        catalog = load_catalog()
        entries = {
            (ActivityContext.RELAXING, iid): PriorEntry(probability=0.975, excluded=False)
            for iid in catalog.ids
        }
        m = PriorMatrix(entries, catalog)
        arms = init_bandit(m, ActivityContext.RELAXING, strength=19)
        post = arms["breathing_exercise"]
        assert post.alpha == pytest.approx(18.525)
        assert post.beta == pytest.approx(0.475)

    def test_floor_keeps_parameters_positive(self):
        from jitai.domain import PriorEntry, PriorMatrix, load_catalog

        catalog = load_catalog()
        entries = {
            (ActivityContext.RELAXING, iid): PriorEntry(probability=0.999, excluded=False)
            for iid in catalog.ids
        }
        m = PriorMatrix(entries, catalog, cap_adjustment=0.0)
        arms = init_bandit(m, ActivityContext.RELAXING, strength=19)
        assert arms["breathing_exercise"].beta == pytest.approx(0.05)

    def test_uninformed_is_uniform(self, priors):
        arms = init_bandit(priors, ActivityContext.CYCLING, informed=False)
        assert all(p.alpha == 1.0 and p.beta == 1.0 for p in arms.values())

    def test_arms_follow_catalog_order(self, priors, catalog):
        arms = init_bandit(priors, ActivityContext.STUDYING)
        order = {iid: i for i, iid in enumerate(catalog.ids)}
        ids = list(arms.keys())
        assert ids == sorted(ids, key=order.__getitem__)

    def test_invalid_strength(self, priors):
        with pytest.raises(PolicyError):
            init_bandit(priors, ActivityContext.RELAXING, strength=0)


class TestThompsonSelect:
    def test_single_arm_always_selected(self):
        arms = {"only": ArmPosterior(2.0, 3.0)}
        for seed in range(20):
            assert thompson_select(arms, random.Random(seed)) == "only"

    def test_separated_posteriors_pick_the_strong_arm(self):
        arms = {"strong": ArmPosterior(10000, 1), "weak": ArmPosterior(1, 10000)}
        rng = random.Random(123)
        wins = sum(thompson_select(arms, rng) == "strong" for _ in range(10_000))
        assert wins >= 9_900

    def test_same_seed_same_sequence(self, priors):
        arms1 = init_bandit(priors, ActivityContext.STUDYING)
        arms2 = init_bandit(priors, ActivityContext.STUDYING)
        rng1, rng2 = random.Random(42), random.Random(42)
        seq1 = [thompson_select(arms1, rng1) for _ in range(50)]
        seq2 = [thompson_select(arms2, rng2) for _ in range(50)]
        assert seq1 == seq2

    def test_empty_arm_map_rejected(self):
        with pytest.raises(PolicyError):
            thompson_select({}, random.Random(0))

    def test_uninformed_selection_is_uniform(self):
        k = 8
        arms = {f"a{i}": ArmPosterior(1.0, 1.0) for i in range(k)}
        rng = random.Random(99)
        n = 40_000
        counts = {}
        for _ in range(n):
            arm = thompson_select(arms, rng)
            counts[arm] = counts.get(arm, 0) + 1
        for arm in arms:
            assert counts.get(arm, 0) / n == pytest.approx(1 / k, abs=0.02)


class TestBetaDraw:
    def test_uniform_special_case_matches_uniform(self):
        rng1, rng2 = random.Random(5), random.Random(5)
        assert beta_draw(rng1, 1.0, 1.0) == rng2.random()

    def test_draws_lie_in_unit_interval(self):
        rng = random.Random(11)
        for _ in range(2000):
            x = beta_draw(rng, rng.uniform(0.05, 50), rng.uniform(0.05, 50))
            assert 0.0 <= x <= 1.0

    def test_mean_tracks_alpha_fraction(self):
        rng = random.Random(3)
        draws = [beta_draw(rng, 8.0, 2.0) for _ in range(20_000)]
        assert sum(draws) / len(draws) == pytest.approx(0.8, abs=0.01)


class TestUpdatePosterior:
    def test_unit_success(self):
        arms = {"a": ArmPosterior(1, 1)}
        update_posterior(arms, "a", 1.0)
        assert (arms["a"].alpha, arms["a"].beta) == (2.0, 1.0)

    def test_half_reward_splits_evidence(self):
        arms = {"a": ArmPosterior(2, 3)}
        update_posterior(arms, "a", 0.5)
        assert (arms["a"].alpha, arms["a"].beta) == (2.5, 3.5)

    def test_unit_failure(self):
        arms = {"a": ArmPosterior(2, 1)}
        update_posterior(arms, "a", 0.0)
        assert (arms["a"].alpha, arms["a"].beta) == (2.0, 2.0)

    def test_unknown_arm(self):
        with pytest.raises(PolicyError):
            update_posterior({"a": ArmPosterior(1, 1)}, "b", 1.0)

    def test_reward_out_of_range(self):
        with pytest.raises(PolicyError):
            update_posterior({"a": ArmPosterior(1, 1)}, "a", 1.5)

    def test_other_arms_untouched(self):
        arms = {"a": ArmPosterior(1, 1), "b": ArmPosterior(4, 6)}
        update_posterior(arms, "a", 1.0)
        assert (arms["b"].alpha, arms["b"].beta) == (4.0, 6.0)

    def test_mass_grows_by_one_and_mean_moves_toward_reward(self):
        rng = random.Random(17)
        for _ in range(10_000):
            a, b = rng.uniform(0.05, 30), rng.uniform(0.05, 30)
            arms = {"x": ArmPosterior(a, b)}
            before_mass = a + b
            before_mean = arms["x"].mean
            reward = rng.choice([0.0, 0.5, 1.0])
            update_posterior(arms, "x", reward)
            post = arms["x"]
            assert post.alpha + post.beta == pytest.approx(before_mass + 1.0, abs=1e-12)
            if reward > before_mean:
                assert post.mean >= before_mean
            elif reward < before_mean:
                assert post.mean <= before_mean
            else:
                assert post.mean == pytest.approx(before_mean)


class TestBaselines:
    def _arms(self):
        return {
            "a": ArmPosterior(9, 1),   # mean 0.9
            "b": ArmPosterior(2, 8),   # mean 0.2
            "c": ArmPosterior(5, 5),   # mean 0.5
        }

    def test_round_robin_cycles_in_order(self):
        arms = self._arms()
        spec = PolicySpec(kind=PolicyKind.UNIFORM_ROUND_ROBIN)
        rng = random.Random(0)
        picks = [baseline_select(spec, arms, t, rng) for t in range(4)]
        assert picks == ["a", "b", "c", "a"]

    def test_epsilon_zero_is_pure_exploitation(self):
        arms = self._arms()
        spec = PolicySpec(kind=PolicyKind.EPSILON_GREEDY, epsilon=0.0)
        rng = random.Random(1)
        assert all(baseline_select(spec, arms, t, rng) == "a" for t in range(50))

    def test_decaying_epsilon_schedule(self):
        # epsilon_t = 1 / (1 + 1 * 9) = 0.1: measure the exploration rate
        spec = PolicySpec(kind=PolicyKind.DECAYING_EPSILON, epsilon=1.0, decay=1.0)
        arms = self._arms()
        rng = random.Random(2)
        n = 30_000
        explored = 0
        for _ in range(n):
            pick = baseline_select(spec, arms, 9, rng)
            if pick != "a":
                explored += 1
        # exploring picks uniformly, so non-greedy arms appear at eps * 2/3
        assert explored / n == pytest.approx(0.1 * 2 / 3, abs=0.01)

    def test_random_is_roughly_uniform(self):
        arms = self._arms()
        spec = PolicySpec(kind=PolicyKind.RANDOM)
        rng = random.Random(3)
        n = 30_000
        counts = {"a": 0, "b": 0, "c": 0}
        for t in range(n):
            counts[baseline_select(spec, arms, t, rng)] += 1
        for arm in counts:
            assert counts[arm] / n == pytest.approx(1 / 3, abs=0.02)

    def test_greedy_tie_breaks_by_catalog_order(self):
        arms = {"first": ArmPosterior(5, 5), "second": ArmPosterior(5, 5)}
        spec = PolicySpec(kind=PolicyKind.EPSILON_GREEDY, epsilon=0.0)
        assert baseline_select(spec, arms, 0, random.Random(0)) == "first"

    def test_scaling_preserves_means_and_greedy_choice(self):
        rng = random.Random(23)
        for _ in range(200):
            arms = {
                f"a{i}": ArmPosterior(rng.uniform(0.1, 20), rng.uniform(0.1, 20))
                for i in range(5)
            }
            factor = rng.uniform(0.5, 10)
            scaled = {
                k: ArmPosterior(p.alpha * factor, p.beta * factor) for k, p in arms.items()
            }
            for k in arms:
                assert scaled[k].mean == pytest.approx(arms[k].mean, abs=1e-12)
            spec = PolicySpec(kind=PolicyKind.EPSILON_GREEDY, epsilon=0.0)
            assert baseline_select(spec, arms, 0, random.Random(0)) == baseline_select(
                spec, scaled, 0, random.Random(0)
            )

    def test_invalid_spec_parameters(self):
        with pytest.raises(PolicyError):
            PolicySpec(kind=PolicyKind.EPSILON_GREEDY, epsilon=1.5)
        with pytest.raises(PolicyError):
            PolicySpec(kind=PolicyKind.DECAYING_EPSILON, decay=-1)


class TestBanditBank:
    def test_lazy_init_and_decision_count(self, priors):
        bank = BanditBank(priors)
        rng = random.Random(0)
        bandit = bank.bandit(ActivityContext.WALKING)
        assert bandit.decision_count == 0
        spec = PolicySpec()
        for i in range(5):
            bandit.select(spec, rng)
        assert bandit.decision_count == 5

    def test_arm_set_matches_eligibility(self, priors):
        from jitai.domain import eligible_arms

        bank = BanditBank(priors)
        for ctx in ActivityContext:
            assert list(bank.bandit(ctx).arms.keys()) == eligible_arms(priors, ctx)

    def test_select_arm_dispatches_all_kinds(self, priors):
        bank = BanditBank(priors)
        arms = bank.bandit(ActivityContext.RELAXING).arms
        rng = random.Random(5)
        for kind in PolicyKind:
            spec = PolicySpec(kind=kind)
            assert select_arm(spec, arms, 0, rng) in arms
