import numpy as np
import pytest

from hiqlip import (
    CapError,
    CouplingProblem,
    SolverConfig,
    build_cut_problem,
    build_fgl_problem,
    class_reduction,
    cut_norm_inf1,
    energy,
    fgl_problem_from_matrix,
    solve,
)
from oracles import cut_norm_enum, fgl2_enum, min_energy_enum, random_coupling_problem


class TestBuildCutProblem:
    def test_single_entry(self, cfg_exhaustive):
        prob = build_cut_problem([[2.5]])
        assert prob.n_vars == 2
        assert prob.couplings == {(0, 1): 2.5}
        asn = solve(prob, cfg_exhaustive)
        assert asn.energy == -2.5

    def test_sign_separable(self, cfg_exhaustive):
        prob = build_cut_problem([[1.0, -1.0], [-1.0, 1.0]])
        asn = solve(prob, cfg_exhaustive)
        assert asn.energy == -4.0

    def test_random_matches_enumeration(self, cfg_exhaustive):
        rng = np.random.default_rng(17)
        for _ in range(10):
            A = rng.normal(size=(3, 3))
            prob = build_cut_problem(A)
            got = -solve(prob, cfg_exhaustive).energy
            # enumerate both sign sides directly, no Ising encoding
            want = cut_norm_enum(A)
            assert got == pytest.approx(want, rel=1e-12)

    def test_no_intra_side_couplings(self):
        prob = build_cut_problem(np.ones((3, 4)))
        for (i, j) in prob.couplings:
            assert i < 3 <= j

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            build_cut_problem(np.zeros((0, 2)))


class TestEnergy:
    def test_antialigned_pair(self):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 2.0})
        assert energy(prob, [1, -1]) == 2.0

    def test_zero_couplings(self):
        prob = CouplingProblem(n_vars=3, couplings={})
        for s in ([1, 1, 1], [1, -1, 1], [-1, -1, -1]):
            assert energy(prob, s) == 0.0

    def test_z2_symmetry_no_fields(self):
        rng = np.random.default_rng(3)
        prob = random_coupling_problem(rng, 8)
        s = rng.choice([-1, 1], size=8)
        assert energy(prob, s) == energy(prob, -s)

    def test_field_antisymmetry(self):
        rng = np.random.default_rng(4)
        prob = random_coupling_problem(rng, 6, with_fields=True)
        s = rng.choice([-1, 1], size=6)
        h = prob.field_vector()
        diff = energy(prob, -s) - energy(prob, s)
        assert diff == pytest.approx(2.0 * float(h @ s), rel=1e-12, abs=1e-12)

    def test_length_mismatch(self):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 1.0})
        with pytest.raises(ValueError):
            energy(prob, [1, 1, 1])

    def test_non_spin_entry(self):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 1.0})
        with pytest.raises(ValueError):
            energy(prob, [1, 0])


class TestSolve:
    def test_two_spin_alignment(self, cfg_exhaustive):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 1.0})
        asn = solve(prob, cfg_exhaustive)
        assert asn.energy == -1.0
        assert asn.spins[0] == asn.spins[1]

    def test_pinned_respected(self, cfg_exhaustive):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 1.0}, pinned={0: 1})
        asn = solve(prob, cfg_exhaustive)
        assert list(asn.spins) == [1, 1]

    def test_annealing_matches_exhaustive_12_spins(self):
        rng = np.random.default_rng(8)
        prob = random_coupling_problem(rng, 12)
        e_ex = solve(prob, SolverConfig(backend="exhaustive", seed=0)).energy
        e_an = solve(prob, SolverConfig(backend="annealing", seed=1, num_reads=32)).energy
        assert e_an == pytest.approx(e_ex, rel=1e-9)

    def test_exhaustive_cap(self):
        prob = CouplingProblem(n_vars=40, couplings={(0, 1): 1.0})
        with pytest.raises(CapError):
            solve(prob, SolverConfig(backend="exhaustive", seed=0, max_vars_exhaustive=24))

    def test_energy_invariant_recomputed(self, cfg_annealing_fast):
        rng = np.random.default_rng(21)
        prob = random_coupling_problem(rng, 10, with_fields=True)
        asn = solve(prob, cfg_annealing_fast)
        assert asn.energy == energy(prob, asn.spins)

    def test_deterministic_for_fixed_seed(self):
        rng = np.random.default_rng(22)
        prob = random_coupling_problem(rng, 14)
        cfg = SolverConfig(backend="annealing", seed=5, num_reads=4, sweeps=50)
        a = solve(prob, cfg)
        b = solve(prob, cfg)
        assert np.array_equal(a.spins, b.spins)
        assert a.energy == b.energy

    def test_monotone_reads(self):
        rng = np.random.default_rng(23)
        prob = random_coupling_problem(rng, 18)
        # few sweeps so extra reads actually matter
        energies = [
            solve(prob, SolverConfig(backend="annealing", seed=7, num_reads=r, sweeps=5,
                                     beta_schedule=(0.1, 1.0))).energy
            for r in (1, 2, 4, 8, 16)
        ]
        assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(energies, energies[1:]))

    def test_pinned_only_problem(self, cfg_exhaustive):
        prob = CouplingProblem(n_vars=2, couplings={(0, 1): 3.0}, pinned={0: 1, 1: -1})
        asn = solve(prob, cfg_exhaustive)
        assert list(asn.spins) == [1, -1]
        assert asn.energy == 3.0


class TestCutNorm:
    def test_scalar(self, cfg_exhaustive):
        assert cut_norm_inf1([[-3.5]], cfg_exhaustive).value == 3.5

    def test_row_vector_is_l1(self, cfg_exhaustive):
        v = np.array([[1.5, -2.0, 0.25, 3.0]])
        assert cut_norm_inf1(v, cfg_exhaustive).value == pytest.approx(6.75, rel=1e-12)

    def test_annealing_matches_exhaustive_4x4(self):
        hits = 0
        for k in range(100):
            rng = np.random.default_rng(3000 + k)
            A = rng.uniform(-1, 1, (4, 4))
            v_ex = cut_norm_inf1(A, SolverConfig(backend="exhaustive", seed=0)).value
            v_an = cut_norm_inf1(A, SolverConfig(backend="annealing", seed=k)).value
            if v_an == pytest.approx(v_ex, rel=1e-9):
                hits += 1
        assert hits >= 95

    def test_homogeneity(self, cfg_exhaustive):
        rng = np.random.default_rng(31)
        A = rng.normal(size=(4, 5))
        base = cut_norm_inf1(A, cfg_exhaustive).value
        for c in (2.0, -0.5, 3.75):
            assert cut_norm_inf1(c * A, cfg_exhaustive).value == pytest.approx(abs(c) * base, rel=1e-12)

    def test_permutation_invariance(self, cfg_exhaustive):
        rng = np.random.default_rng(32)
        A = rng.normal(size=(5, 4))
        base = cut_norm_inf1(A, cfg_exhaustive).value
        pr = rng.permutation(5)
        pc = rng.permutation(4)
        assert cut_norm_inf1(A[pr][:, pc], cfg_exhaustive).value == pytest.approx(base, rel=1e-12)

    def test_oracle_equivalence_small(self, cfg_exhaustive):
        rng = np.random.default_rng(33)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(1, 17 - n))
            A = rng.uniform(-1, 1, (n, m))
            assert cut_norm_inf1(A, cfg_exhaustive).value == cut_norm_enum(A)

    def test_bound_kinds(self, cfg_exhaustive, cfg_annealing_fast):
        A = np.ones((2, 2))
        assert cut_norm_inf1(A, cfg_exhaustive).bound_kind == "exact"
        assert cut_norm_inf1(A, cfg_annealing_fast).bound_kind == "lower"


class TestFglProblem:
    def test_pinned_field_correction(self, cfg_exhaustive, tiny_net):
        # A = [1, -1]: plain cut norm 2, exact {0,1} maximum 1
        red = class_reduction(tiny_net, 0)
        fgl = build_fgl_problem(red)
        assert -solve(fgl, cfg_exhaustive).energy / 2 == pytest.approx(1.0, rel=1e-12)
        cut = build_cut_problem(red.A)
        assert -solve(cut, cfg_exhaustive).energy == pytest.approx(2.0, rel=1e-12)

    def test_identity(self, cfg_exhaustive):
        prob = fgl_problem_from_matrix(np.eye(2))
        assert -solve(prob, cfg_exhaustive).energy / 2 == pytest.approx(2.0, rel=1e-12)

    def test_zero_matrix(self, cfg_exhaustive):
        prob = fgl_problem_from_matrix(np.zeros((3, 2)))
        assert solve(prob, cfg_exhaustive).energy == 0.0

    def test_structure(self):
        prob = fgl_problem_from_matrix(np.ones((2, 3)))
        assert prob.n_vars == 6
        assert prob.pinned == {5: 1}
        # pinned spin couples only to the row side, with row sums
        assert prob.couplings[(0, 5)] == 3.0
        assert prob.couplings[(1, 5)] == 3.0
        assert (2, 5) not in prob.couplings

    def test_matches_pattern_enumeration(self, cfg_exhaustive):
        rng = np.random.default_rng(41)
        for _ in range(15):
            n = int(rng.integers(1, 7))
            m = int(rng.integers(1, 11))
            A = rng.uniform(-1, 1, (n, m))
            prob = fgl_problem_from_matrix(A)
            got = -solve(prob, cfg_exhaustive).energy / 2
            assert got == pytest.approx(fgl2_enum(A), rel=1e-9)

    def test_ising_oracle_equivalence(self, cfg_exhaustive):
        # independent full-state enumeration of the encoded problem
        rng = np.random.default_rng(42)
        A = rng.normal(size=(3, 4))
        prob = fgl_problem_from_matrix(A)
        assert solve(prob, cfg_exhaustive).energy == pytest.approx(min_energy_enum(prob), rel=1e-12)


class TestSolverConfig:
    def test_beta_order(self):
        with pytest.raises(ValueError):
            SolverConfig(beta_schedule=(5.0, 1.0))

    def test_cap_limit(self):
        with pytest.raises(ValueError):
            SolverConfig(max_vars_exhaustive=31)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            SolverConfig(backend="quantum")

    def test_derived_seed_stable(self):
        cfg = SolverConfig(seed=9)
        assert cfg.derived(1, 2).seed == cfg.derived(1, 2).seed
        assert cfg.derived(1, 2).seed != cfg.derived(2, 1).seed
