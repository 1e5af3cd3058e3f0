"""Experiment harness tests: samplers, invariance runs, battery determinism."""

import numpy as np
import pytest

from copula_lab.errors import ConfigError, InputError
from copula_lab.experiments import (
    DistributionSpec,
    ExperimentConfig,
    copula_invariance_experiment,
    draw_sample,
    load_shipped_config,
    parse_config_document,
    pearson_breakage_experiment,
    pearson_invariance_experiment,
    rng_for,
    run_battery,
    shipped_config_names,
)
from copula_lab.families import fgm as fgm_copula
from copula_lab.stats import Sample, empirical_copula, kendall_tau, pearson_rho
from copula_lab.transforms import TransformSpec


def config(
    experiment="copula_invariance",
    seed=7,
    n=200,
    dist=None,
    transforms=None,
    reps=1,
):
    return ExperimentConfig(
        experiment=experiment,
        seed=seed,
        n_samples=n,
        distribution=dist or DistributionSpec.bivariate_normal(0.5),
        transforms=transforms or (TransformSpec.exp(), TransformSpec.affine(3, 1)),
        repetitions=reps,
    )


class TestDistributions:
    def test_validation(self):
        with pytest.raises(ConfigError):
            DistributionSpec.bivariate_normal(1.0)
        with pytest.raises(ConfigError):
            DistributionSpec.fgm(1.5)
        with pytest.raises(ConfigError):
            DistributionSpec(kind="cauchy")

    def test_sampler_determinism(self):
        dist = DistributionSpec.bivariate_normal(0.3)
        a = draw_sample(dist, 50, rng_for(123, 0))
        b = draw_sample(dist, 50, rng_for(123, 0))
        c = draw_sample(dist, 50, rng_for(123, 1))
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
        assert not np.array_equal(a.x, c.x)

    def test_uniform_and_fgm_land_in_unit_square(self):
        for dist in (DistributionSpec.uniform_square(), DistributionSpec.fgm(-1.0)):
            s = draw_sample(dist, 500, rng_for(5, 0))
            assert np.all((s.x >= 0) & (s.x <= 1)) and np.all((s.y >= 0) & (s.y <= 1))

    def test_normal_sampler_recovers_rho(self):
        s = draw_sample(DistributionSpec.bivariate_normal(0.5), 50_000, rng_for(77, 0))
        assert pearson_rho(s) == pytest.approx(0.5, abs=0.015)

    def test_fgm_sampler_matches_family_cdf(self):
        # the empirical copula of FGM draws must approach the FGM formula
        theta = 1.0
        s = draw_sample(DistributionSpec.fgm(theta), 20_000, rng_for(31, 0))
        ec = empirical_copula(s)
        c = fgm_copula(theta)
        for u, v in [(0.25, 0.25), (0.5, 0.5), (0.5, 0.75), (0.75, 0.25)]:
            assert ec(u, v) == pytest.approx(c(u, v), abs=0.012)


class TestExperimentConfig:
    def test_field_validation_names_fields(self):
        with pytest.raises(ConfigError, match="n_samples"):
            config(n=5)
        with pytest.raises(ConfigError, match="repetitions"):
            config(reps=0)
        with pytest.raises(ConfigError, match="seed"):
            config(seed=-1)
        with pytest.raises(ConfigError, match="experiment"):
            config(experiment="bootstrap")

    def test_json_roundtrip(self):
        cfg = config(reps=3)
        assert ExperimentConfig.from_json_dict(cfg.to_json_dict()) == cfg

    def test_document_parsing_errors(self):
        with pytest.raises(ConfigError, match="schema_version"):
            parse_config_document({"experiments": []})
        with pytest.raises(ConfigError, match="experiments"):
            parse_config_document({"schema_version": 1, "experiments": []})
        with pytest.raises(ConfigError, match="transforms"):
            parse_config_document(
                {
                    "schema_version": 1,
                    "experiments": [
                        {
                            "experiment": "copula_invariance",
                            "seed": 1,
                            "n_samples": 100,
                            "distribution": {"kind": "uniform_square"},
                            "transforms": [{"kind": "exp"}],
                        }
                    ],
                }
            )


class TestCopulaInvariance:
    def test_strictly_increasing_pair_is_exact(self):
        results = copula_invariance_experiment(config(reps=3))
        assert len(results) == 9
        for r in results:
            assert r.exact_expected
            assert r.abs_delta == 0.0

    def test_identity_pair_all_deltas_zero(self):
        results = copula_invariance_experiment(
            config(transforms=(TransformSpec.identity(), TransformSpec.identity()))
        )
        assert all(r.abs_delta == 0.0 for r in results)

    def test_negating_x_flips_kendall_exactly(self):
        cfg = config(transforms=(TransformSpec.negate(), TransformSpec.identity()), seed=11)
        results = {r.statistic_name: r for r in copula_invariance_experiment(cfg)}
        tau = results["kendall_tau"]
        assert not tau.exact_expected
        assert tau.after == -tau.before
        # brute-force confirmation on the very sample the experiment used
        s = draw_sample(cfg.distribution, cfg.n_samples, rng_for(cfg.seed, 0))
        flipped = Sample(-s.x, s.y)
        assert kendall_tau(flipped) == -kendall_tau(s)

    def test_square_on_sign_changing_support_breaks_distance(self):
        cfg = config(transforms=(TransformSpec.power(2), TransformSpec.identity()), seed=13)
        results = {r.statistic_name: r for r in copula_invariance_experiment(cfg)}
        assert not results["empirical_copula_distance"].exact_expected
        assert results["empirical_copula_distance"].after > 0.0


class TestPearsonInvariance:
    def test_positive_slopes_preserve_to_float_precision(self):
        cfg = config(
            experiment="pearson_invariance",
            transforms=(TransformSpec.affine(2, 5), TransformSpec.affine(0.5, -3)),
            reps=4,
        )
        for r in pearson_invariance_experiment(cfg):
            assert r.abs_delta <= 1e-12
            assert r.expected_after == r.before

    def test_negative_slope_flips_sign(self):
        cfg = config(
            experiment="pearson_invariance",
            transforms=(TransformSpec.affine(-1, 0), TransformSpec.identity()),
            reps=2,
        )
        for r in pearson_invariance_experiment(cfg):
            assert abs(r.after - (-r.before)) <= 1e-12
            assert r.expected_after == -r.before

    def test_requires_affine_pair(self):
        cfg = config(experiment="pearson_invariance")
        with pytest.raises(InputError):
            pearson_invariance_experiment(cfg)


class TestPearsonBreakage:
    def test_rho_09_gap_near_009(self):
        cfg = config(
            experiment="pearson_breakage",
            dist=DistributionSpec.bivariate_normal(0.9),
            transforms=(TransformSpec.power(2), TransformSpec.power(2)),
            n=20_000,
            reps=4,
            seed=19,
        )
        result = pearson_breakage_experiment(cfg)
        assert result.expected_after == pytest.approx(0.81)
        assert result.after == pytest.approx(0.81, abs=0.02)
        assert result.before == pytest.approx(0.9, abs=0.02)
        assert result.standard_error > 0.0

    def test_config_errors(self):
        base = dict(
            experiment="pearson_breakage",
            transforms=(TransformSpec.power(2), TransformSpec.power(2)),
            n=1000,
            reps=4,
        )
        with pytest.raises(ConfigError, match="rho != 0"):
            pearson_breakage_experiment(
                config(dist=DistributionSpec.bivariate_normal(0.0), **base)
            )
        with pytest.raises(ConfigError, match="bivariate_normal"):
            pearson_breakage_experiment(config(dist=DistributionSpec.uniform_square(), **base))
        with pytest.raises(ConfigError, match="repetitions"):
            pearson_breakage_experiment(
                config(
                    experiment="pearson_breakage",
                    transforms=(TransformSpec.power(2), TransformSpec.power(2)),
                    n=1000,
                    reps=1,
                )
            )
        with pytest.raises(ConfigError, match="power"):
            pearson_breakage_experiment(
                config(experiment="pearson_breakage", n=1000, reps=4)
            )


class TestRunBattery:
    def test_empty_battery_rejected(self):
        with pytest.raises(InputError):
            run_battery([])

    def test_deterministic_reports(self):
        configs = load_shipped_config("increasing")
        a = run_battery(configs).to_json_dict()
        b = run_battery(configs).to_json_dict()
        assert a == b

    def test_thread_pool_matches_serial(self, monkeypatch):
        configs = load_shipped_config("increasing")
        serial = run_battery(configs).to_json_dict()
        monkeypatch.setenv("COPULA_LAB_THREADS", "4")
        threaded = run_battery(configs).to_json_dict()
        assert serial == threaded

    def test_invalid_thread_env_rejected(self, monkeypatch):
        monkeypatch.setenv("COPULA_LAB_THREADS", "many")
        with pytest.raises(InputError):
            run_battery(load_shipped_config("increasing"))

    def test_summary_classifies_preservation(self):
        configs = [
            config(seed=23, reps=2),
            config(
                experiment="pearson_breakage",
                dist=DistributionSpec.bivariate_normal(0.5),
                transforms=(TransformSpec.power(2), TransformSpec.power(2)),
                n=2000,
                reps=3,
                seed=29,
            ),
        ]
        report = run_battery(configs)
        by_key = {
            (row["experiment_index"], row["statistic"]): row["preservation"]
            for row in report.summary
        }
        assert by_key[(0, "kendall_tau")] == "exact"
        assert by_key[(0, "empirical_copula_distance")] == "exact"
        assert by_key[(1, "pearson_rho")] == "broken"
        assert report.all_exact_held

    def test_exact_violation_flips_flag(self):
        # squaring on sign-changing support is nonmonotone: exact_expected is
        # False, so the flag stays True even though deltas are nonzero
        cfg = config(transforms=(TransformSpec.power(2), TransformSpec.identity()), seed=13)
        report = run_battery([cfg])
        assert report.all_exact_held
        classes = {row["transform_class"] for row in report.summary}
        assert classes == {"contains_nonmonotone"}

    def test_shipped_config_names(self):
        assert set(shipped_config_names()) == {"increasing", "square-breakage"}


class TestConverseObservation:
    """Exactness across a battery occurs only for strictly increasing pairs,
    and any pair with a nonmonotone member visibly moves the empirical copula."""

    def battery(self):
        increasing = load_shipped_config("increasing")[:3]
        negate_pair = config(
            transforms=(TransformSpec.negate(), TransformSpec.negate()), seed=41, reps=3
        )
        square_pair = config(
            transforms=(TransformSpec.power(2), TransformSpec.identity()), seed=43, reps=3
        )
        return increasing + [negate_pair, square_pair]

    def test_exact_everywhere_implies_strictly_increasing(self):
        report = run_battery(self.battery())
        for record in report.experiments:
            all_exact = all(r["abs_delta"] == 0.0 for r in record["results"])
            if all_exact:
                assert record["transform_class"] == "strictly_increasing_pair"

    def test_nonmonotone_member_breaks_the_empirical_copula(self):
        report = run_battery(self.battery())
        for record in report.experiments:
            if record["transform_class"] == "contains_nonmonotone":
                distances = [
                    r["abs_delta"]
                    for r in record["results"]
                    if r["statistic_name"] == "empirical_copula_distance"
                ]
                assert any(d > 0.0 for d in distances)

    def test_double_negation_keeps_rank_coefficients_but_not_the_copula(self):
        # negating both coordinates preserves concordance, so tau and rho_s are
        # unchanged, yet the empirical copula itself moves (survival reflection)
        cfg = config(
            transforms=(TransformSpec.negate(), TransformSpec.negate()), seed=41, reps=1
        )
        results = {r.statistic_name: r for r in copula_invariance_experiment(cfg)}
        assert results["kendall_tau"].abs_delta == 0.0
        assert results["spearman_rho"].abs_delta == 0.0
        assert results["empirical_copula_distance"].abs_delta > 0.0
        assert not results["kendall_tau"].exact_expected
