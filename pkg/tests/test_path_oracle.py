import math

import numpy as np
import pytest

from pnlattr import (
    FxMode,
    GbmSpec,
    InvalidCorrelation,
    LengthMismatch,
    NonFiniteDerivative,
    PathSet,
    SimulationParams,
    StudyResult,
    compare_coarse_vs_fine,
    covariation_study,
    grid_ito_decomposition,
    grid_product_decomposition,
    simulate_paths,
    write_discrepancy_csv,
)

TWO_GBM = SimulationParams(
    processes=(
        GbmSpec("asset", initial=100.0, drift=0.03, volatility=0.2),
        GbmSpec("fx", initial=1.1, drift=0.0, volatility=0.1),
    ),
)


def test_zero_vol_zero_drift_paths_are_constant():
    params = SimulationParams(processes=(
        GbmSpec("asset", initial=100.0),
        GbmSpec("fx", initial=1.1),
    ))
    paths = simulate_paths(params, n_steps=8, seed=3)
    assert np.all(paths.paths["asset"] == 100.0)
    assert np.all(paths.paths["fx"] == 1.1)


def test_same_seed_is_bit_identical():
    a = simulate_paths(TWO_GBM, n_steps=32, seed=7)
    b = simulate_paths(TWO_GBM, n_steps=32, seed=7)
    assert np.array_equal(a.grid, b.grid)
    for name in a.paths:
        assert np.array_equal(a.paths[name], b.paths[name])
    c = simulate_paths(TWO_GBM, n_steps=32, seed=8)
    assert not np.array_equal(a.paths["asset"], c.paths["asset"])


def test_bad_inputs_rejected():
    with pytest.raises(InvalidCorrelation):
        simulate_paths(
            SimulationParams(processes=TWO_GBM.processes,
                             correlation=np.array([[1.0, 1.5], [1.5, 1.0]])),
            n_steps=4, seed=0,
        )
    with pytest.raises(InvalidCorrelation):
        simulate_paths(
            SimulationParams(processes=TWO_GBM.processes,
                             correlation=np.array([[1.0, 0.2], [0.6, 1.0]])),
            n_steps=4, seed=0,
        )
    with pytest.raises(ValueError):
        simulate_paths(TWO_GBM, n_steps=0, seed=0)
    with pytest.raises(ValueError):
        GbmSpec("asset", initial=100.0, volatility=-0.1)
    with pytest.raises(ValueError):
        GbmSpec("asset", initial=100.0, jump_size=-1.0)


def test_perfect_correlation_is_valid():
    params = SimulationParams(processes=TWO_GBM.processes,
                              correlation=np.array([[1.0, 1.0], [1.0, 1.0]]))
    paths = simulate_paths(params, n_steps=16, seed=1)
    # identical driving noise: log-returns are proportional
    la = np.diff(np.log(paths.paths["asset"]))
    lf = np.diff(np.log(paths.paths["fx"]))
    da = (la - la.mean()) / 0.2
    df = (lf - lf.mean()) / 0.1
    assert np.allclose(da, df, atol=1e-10)


def test_fx_path_stays_positive_even_with_huge_vol():
    params = SimulationParams(processes=(
        GbmSpec("asset", initial=100.0, volatility=3.0),
        GbmSpec("fx", initial=1.0, volatility=2.5),
    ))
    paths = simulate_paths(params, n_steps=16, seed=11)
    assert np.all(paths.paths["fx"] > 0.0)
    assert np.all(paths.paths["asset"] > 0.0)


def test_three_point_product_decomposition():
    dec = grid_product_decomposition([100.0, 105.0, 110.0], [1.0, 1.1, 1.2])
    assert dec.fx_integral == pytest.approx(20.5, rel=1e-12)
    assert dec.asset_integral == pytest.approx(10.5, rel=1e-12)
    assert dec.covariation == pytest.approx(1.0, rel=1e-12)
    assert dec.total == pytest.approx(32.0, rel=1e-14)
    assert dec.fx_integral + dec.asset_integral + dec.covariation == pytest.approx(32.0, rel=1e-14)


def test_constant_fx_collapses_to_asset_integral():
    dec = grid_product_decomposition([100.0, 103.0, 99.0, 108.0], [1.5, 1.5, 1.5, 1.5])
    assert dec.fx_integral == 0.0
    assert dec.covariation == 0.0
    assert dec.asset_integral == pytest.approx(1.5 * 8.0, rel=1e-14)


def test_single_step_decomposition():
    dec = grid_product_decomposition([100.0, 110.0], [1.0, 1.2])
    assert dec.fx_integral == pytest.approx(100 * 0.2, rel=1e-12)
    assert dec.asset_integral == pytest.approx(1.0 * 10, rel=1e-12)
    assert dec.covariation == pytest.approx(10 * 0.2, rel=1e-12)


def test_length_mismatch_rejected():
    with pytest.raises(LengthMismatch):
        grid_product_decomposition([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(LengthMismatch):
        grid_product_decomposition([1.0], [1.0])


def test_telescoping_identity_on_simulated_paths():
    for seed in range(20):
        paths = simulate_paths(TWO_GBM, n_steps=256, seed=seed)
        a, chi = paths.paths["asset"], paths.paths["fx"]
        dec = grid_product_decomposition(a, chi)
        total = a[-1] * chi[-1] - a[0] * chi[0]
        parts = dec.fx_integral + dec.asset_integral + dec.covariation
        assert abs(parts - total) <= 1e-12 * max(1.0, abs(a[-1] * chi[-1]), abs(a[0] * chi[0]))


def test_manual_common_jump_lands_in_covariation():
    # flat paths except one synchronized jump: the covariation must carry
    # exactly the product of the two jump sizes
    a = np.array([100.0, 100.0, 105.0, 105.0])
    chi = np.array([1.0, 1.0, 1.1, 1.1])
    dec = grid_product_decomposition(a, chi)
    assert dec.covariation == pytest.approx(5.0 * 0.1, rel=1e-12)
    assert dec.fx_integral == pytest.approx(100 * 0.1, rel=1e-12)
    assert dec.asset_integral == pytest.approx(1.0 * 5.0, rel=1e-12)


def test_simulated_common_jumps_keep_the_identity():
    params = SimulationParams(
        processes=(
            GbmSpec("asset", initial=100.0, volatility=0.15, jump_size=0.08),
            GbmSpec("fx", initial=1.1, volatility=0.08, jump_size=-0.05),
        ),
        jump_intensity=8.0,
    )
    jumped = False
    for seed in range(10):
        paths = simulate_paths(params, n_steps=128, seed=seed)
        a, chi = paths.paths["asset"], paths.paths["fx"]
        dec = grid_product_decomposition(a, chi)
        total = a[-1] * chi[-1] - a[0] * chi[0]
        assert abs(dec.fx_integral + dec.asset_integral + dec.covariation - total) <= 1e-12 * max(
            1.0, abs(total), abs(a[0] * chi[0])
        )
        jumped = jumped or np.any(np.abs(np.diff(np.log(a))) > 0.05)
    assert jumped


def test_pathset_validation():
    with pytest.raises(LengthMismatch):
        PathSet(grid=[0.0, 0.5, 1.0], paths={"asset": [1.0, 2.0]}, seed=0)
    with pytest.raises(ValueError):
        PathSet(grid=[0.0, 1.0], paths={"fx": [1.0, -0.5]}, seed=0)


def test_ito_linear_pricer_recovers_closed_forms():
    theta, beta, gamma = 4.0, 200.0, -70.0
    def pricer(s, r, x):
        return 50.0 + theta * s + beta * r + gamma * x
    n = 64
    grid = np.linspace(0.0, 1.0, n + 1)
    path_r = np.linspace(0.01, 0.03, n + 1)
    path_x = np.linspace(0.05, 0.02, n + 1)
    dec = grid_ito_decomposition(pricer, path_r, path_x, grid)
    assert dec.carry == pytest.approx(theta * 1.0, abs=1e-6)
    assert dec.rate == pytest.approx(beta * 0.02, abs=1e-6)
    assert dec.market == pytest.approx(gamma * -0.03, abs=1e-6)
    assert abs(dec.residual) < 1e-6


def test_ito_constant_paths_is_pure_carry():
    def pricer(s, r, x):
        return 10.0 + 3.5 * s - 40.0 * r + 15.0 * x
    n = 128
    grid = np.linspace(0.0, 1.0, n + 1)
    r = np.full(n + 1, 0.02)
    x = np.full(n + 1, 0.04)
    dec = grid_ito_decomposition(pricer, r, x, grid)
    assert dec.rate == pytest.approx(0.0, abs=1e-12)
    assert dec.market == pytest.approx(0.0, abs=1e-12)
    assert dec.carry == pytest.approx(dec.total, abs=1e-8)


def test_ito_constant_paths_nonlinear_time_error_is_reported():
    # left-endpoint sums under-shoot a convex time drift by O(1/n); the gap
    # lands in residual instead of being silently re-absorbed
    def pricer(s, r, x):
        return 10.0 * math.exp(0.3 * s) - 40.0 * r + 15.0 * x
    n = 128
    grid = np.linspace(0.0, 1.0, n + 1)
    r = np.full(n + 1, 0.02)
    x = np.full(n + 1, 0.04)
    dec = grid_ito_decomposition(pricer, r, x, grid)
    assert dec.rate == pytest.approx(0.0, abs=1e-12)
    assert dec.market == pytest.approx(0.0, abs=1e-12)
    assert dec.carry == pytest.approx(dec.total, rel=2e-3)
    assert dec.residual == pytest.approx(dec.total - dec.carry, abs=1e-12)
    assert dec.residual > 0.0


def test_ito_residual_shrinks_with_refinement():
    def pricer(s, r, x):
        return (100.0 + 10.0 * s) * (1.0 - 2.0 * r + 30.0 * r * r) + 5.0 * x
    def run(n):
        # half-period swing so the leading cross-term error survives and
        # decays like 1/n instead of cancelling into noise
        grid = np.linspace(0.0, 1.0, n + 1)
        path_r = 0.02 + 0.015 * np.sin(0.5 * math.pi * grid)
        path_x = 0.05 - 0.02 * grid
        return abs(grid_ito_decomposition(pricer, path_r, path_x, grid).residual)
    assert run(1024) < run(16)


def test_ito_nonfinite_derivative():
    def pricer(s, r, x):
        return float("nan") if r < 0.02 else r  # nan just below 0.02
    grid = [0.0, 1.0]
    with pytest.raises(NonFiniteDerivative):
        grid_ito_decomposition(pricer, [0.02, 0.02], [0.0, 0.0], grid)


def test_coarse_and_fine_agree_on_the_total():
    for seed in (0, 5, 9):
        paths = simulate_paths(TWO_GBM, n_steps=64, seed=seed)
        for mode in FxMode:
            cmp = compare_coarse_vs_fine(paths, mode)
            coarse_total = cmp.coarse_fx + cmp.coarse_asset
            fine_total = cmp.fine.fx_integral + cmp.fine.asset_integral + cmp.fine.covariation
            assert coarse_total == pytest.approx(fine_total, rel=1e-12)
            assert coarse_total == pytest.approx(cmp.total, rel=1e-12)


def test_zero_vol_study_has_no_discrepancy():
    params = SimulationParams(processes=(
        GbmSpec("asset", initial=100.0),
        GbmSpec("fx", initial=1.1),
    ))
    cmp = compare_coarse_vs_fine(simulate_paths(params, 16, seed=0))
    assert cmp.fx_diff == 0.0
    assert cmp.asset_diff == 0.0
    assert cmp.fine.covariation == 0.0


def test_study_and_csv_report():
    study = covariation_study(TWO_GBM, n_steps=16, seeds=range(12))
    assert isinstance(study, StudyResult)
    assert len(study.comparisons) == 12
    assert math.isfinite(study.covariation_mean)
    assert study.covariation_stderr > 0.0
    text = write_discrepancy_csv(study)
    lines = text.strip().splitlines()
    assert lines[0] == "seed,n_steps,component,coarse,fine,diff"
    assert len(lines) == 1 + 3 * 12
    # deterministic: same seeds, same text
    assert write_discrepancy_csv(covariation_study(TWO_GBM, n_steps=16, seeds=range(12))) == text
