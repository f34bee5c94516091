import numpy as np
import pytest

from hiqlip import (
    Network,
    SolverConfig,
    block_product,
    brute_force_fgl,
    cut_norm_inf1,
    generate_synthetic,
    hiq_lip_multilayer,
    hiq_lip_two_layer,
    layerwise_recursion,
    mp_coefficient,
    pair_constants,
)
from oracles import fgl_enum


class TestMpCoefficient:
    def test_variant_a_values(self):
        assert mp_coefficient(3, "A") == 0.5
        assert mp_coefficient(4, "A") == 0.25
        assert mp_coefficient(5, "A") == 0.125

    def test_variant_b_values(self):
        assert mp_coefficient(3, "B") == 0.5       # d^(d-3) = 1
        assert mp_coefficient(4, "B") == 1 / 16    # 1/(4 * 4)
        assert mp_coefficient(5, "B") == 1 / 200   # 1/(8 * 25)

    def test_depth_two_degenerate(self):
        assert mp_coefficient(2, "A") == 1.0
        assert mp_coefficient(2, "B") == 2.0  # degenerate; callers route d=2 elsewhere

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            mp_coefficient(1, "A")
        with pytest.raises(ValueError):
            mp_coefficient(3, "C")


class TestLayerwiseRecursion:
    def test_depth_two_equals_two_layer_cut_mode(self, cfg_exhaustive):
        for k in range(10):
            net = generate_synthetic(k, [5, 6, 3])
            rec = layerwise_recursion(net, 1, cfg_exhaustive, top_mode="cut")
            two = hiq_lip_two_layer(net, 1, cfg_exhaustive, qubit_budget=100, problem="cut")
            assert rec.value == two.value

    def test_zero_middle_layer(self, cfg_exhaustive):
        net = generate_synthetic(3, [4, 3, 3, 2])
        net.layers[1][:] = 0.0
        assert layerwise_recursion(net, 0, cfg_exhaustive).value == 0.0

    def test_three_layer_matches_pattern_oracle(self, cfg_exhaustive):
        hits = 0
        for k in range(100):
            net = generate_synthetic(500 + k, [6, 4, 5, 3])
            est = layerwise_recursion(net, 0, cfg_exhaustive, top_mode="fgl")
            oracle = fgl_enum(net, 0)
            assert est.value <= oracle + 1e-9
            if est.value == pytest.approx(oracle, rel=1e-9):
                hits += 1
        assert hits >= 90

    def test_pass_trace_non_decreasing(self, cfg_exhaustive):
        net = generate_synthetic(77, [6, 5, 5, 4])
        est = layerwise_recursion(net, 2, cfg_exhaustive)
        vals = est.solver_stats["pass_values"]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_depth_one_rejected(self, cfg_exhaustive):
        net = generate_synthetic(1, [4, 2])
        with pytest.raises(ValueError):
            layerwise_recursion(net, 0, cfg_exhaustive)

    def test_activation_update_is_coordinatewise_optimal(self, cfg_exhaustive):
        # flipping any single interior entry away from the converged choice
        # never increases the objective at the fixed witness
        net = generate_synthetic(42, [5, 4, 4, 3])
        est = layerwise_recursion(net, 0, cfg_exhaustive, top_mode="fgl")
        w = est.solver_stats["witness"]
        x = np.array(w["x"])
        top = np.array(w["top"])
        D1 = np.array(w["interiors"][0])
        u = net.layers[-1][0]

        def objective(d1vec):
            inner = net.layers[1] @ (d1vec[:, None] * net.layers[0])
            return float((u * top) @ inner @ x)

        base = objective(D1)
        for j in range(D1.shape[0]):
            flipped = D1.copy()
            flipped[j] = 1.0 - flipped[j]
            assert objective(flipped) <= base + 1e-9


class TestBlockProduct:
    def test_single_layer_single_block(self, cfg_exhaustive):
        net = generate_synthetic(5, [4, 3])
        est = block_product(net, 1, 1, cfg_exhaustive)
        assert est.value == pytest.approx(np.abs(net.layers[0][1]).sum(), rel=1e-12)

    def test_b_equals_depth_halves_cut_norm(self, cfg_exhaustive, tiny_net):
        # d=2, b=2: one block, exponent d-B = 1, so the value is gamma/2
        est = block_product(tiny_net, 0, 2, cfg_exhaustive)
        assert est.value == pytest.approx(1.0, rel=1e-12)  # cut norm 2 over c_b=2

    def test_b_one_is_undamped_norm_product(self, cfg_exhaustive):
        net = generate_synthetic(9, [4, 3, 3, 2])
        est = block_product(net, 1, 1, cfg_exhaustive)
        expected = 1.0
        for w in net.layers[:-1]:
            expected *= cut_norm_inf1(w, cfg_exhaustive).value
        expected *= np.abs(net.layers[-1][1]).sum()
        assert est.value == pytest.approx(expected, rel=1e-9)

    def test_block_bounds_brute_force(self, cfg_exhaustive):
        for k in range(100):
            net = generate_synthetic(900 + k, [8, 6, 6, 6, 10])
            blk = block_product(net, 8, 2, cfg_exhaustive)
            exact = brute_force_fgl(net, 8).value
            assert blk.value >= exact - 1e-9

    def test_invalid_b(self, cfg_exhaustive):
        net = generate_synthetic(1, [3, 3, 2])
        with pytest.raises(ValueError):
            block_product(net, 0, 0, cfg_exhaustive)
        with pytest.raises(ValueError):
            block_product(net, 0, 3, cfg_exhaustive)


class TestHiqMultilayer:
    def test_depth_three_variants_identical(self, cfg_exhaustive):
        net = generate_synthetic(55, [6, 5, 5, 10])
        a = hiq_lip_multilayer(net, 8, "A", cfg_exhaustive)
        b = hiq_lip_multilayer(net, 8, "B", cfg_exhaustive)
        assert a.value == b.value  # d^(d-3) = 1 at depth 3

    def test_ratio_identity_with_shared_cache(self, cfg_exhaustive):
        for dims in ([6, 5, 5, 10], [5, 4, 4, 4, 10], [4, 4, 4, 4, 4, 10]):
            d = len(dims) - 1
            net = generate_synthetic(d, dims)
            cache = pair_constants(net, 8, cfg_exhaustive)
            a = hiq_lip_multilayer(net, 8, "A", cfg_exhaustive, pair_cache=cache)
            b = hiq_lip_multilayer(net, 8, "B", cfg_exhaustive, pair_cache=cache)
            assert b.value == a.value / d ** (d - 3)  # bit-for-bit

    def test_variant_a_bounds_brute_force(self, cfg_exhaustive):
        for k in range(100):
            net = generate_synthetic(1500 + k, [6, 5, 5, 10])
            a = hiq_lip_multilayer(net, 8, "A", cfg_exhaustive)
            exact = brute_force_fgl(net, 8).value
            assert a.value >= exact - 1e-9

    def test_depth_two_rejected(self, cfg_exhaustive):
        net = generate_synthetic(2, [4, 3, 2])
        with pytest.raises(ValueError):
            hiq_lip_multilayer(net, 0, "A", cfg_exhaustive)

    def test_pair_cache_matches_fresh_run(self, cfg_exhaustive):
        net = generate_synthetic(66, [5, 4, 4, 10])
        cache = pair_constants(net, 8, cfg_exhaustive)
        fresh = hiq_lip_multilayer(net, 8, "A", cfg_exhaustive)
        cached = hiq_lip_multilayer(net, 8, "A", cfg_exhaustive, pair_cache=cache)
        assert fresh.value == cached.value

    def test_single_pair_mode_flag(self, cfg_exhaustive):
        # literal one-matrix-per-factor reading, kept for comparison
        net = generate_synthetic(67, [5, 4, 4, 10])
        gammas = pair_constants(net, 8, cfg_exhaustive, pair_mode="single")
        assert gammas[-1] == pytest.approx(np.abs(net.layers[-1][8]).sum(), rel=1e-12)
        assert gammas[0] == pytest.approx(cut_norm_inf1(net.layers[1], cfg_exhaustive).value, rel=1e-9)

    def test_ordering_against_baselines(self, cfg_exhaustive):
        # exact <= variant A and exact <= block and exact <= mp on small nets
        from hiqlip import mp_bound

        for k in range(10):
            net = generate_synthetic(2500 + k, [6, 5, 5, 10])
            exact = brute_force_fgl(net, 8).value
            assert exact <= hiq_lip_multilayer(net, 8, "A", cfg_exhaustive).value + 1e-9
            assert exact <= block_product(net, 8, 2, cfg_exhaustive).value + 1e-9
            assert exact <= mp_bound(net, 8).value + 1e-9
