import random
from fractions import Fraction as F

import pytest
from mpmath import mp

from ramseybook.colouring import from_pair_function, mask_of, random_colouring
from ramseybook.errors import (
    DegenerateDensity,
    EmptySet,
    InvalidInput,
    InvalidVertex,
    TensorTooLarge,
)
from ramseybook.geometry import (
    SpecialBranch,
    VectorFamily,
    build_embedding,
    check_special_bounds,
    cosh_sqrt_series,
    find_lambda_witness,
    inner_product,
    key_lemma_step,
    min_density,
    moment_double_sum,
    moment_tensor,
    special_f,
    special_f_series,
    verify_key_step,
    verify_witness,
)


def triangle():
    return from_pair_function(3, 1, lambda u, v: 0)


class TestMinDensity:
    def test_pentagon_global(self, c5):
        assert min_density(c5, c5.vertices, c5.vertices, 0) == F(2, 5)

    def test_pentagon_restricted(self, c5):
        assert min_density(c5, mask_of([0]), mask_of([1, 4]), 0) == 1

    def test_degenerate_self(self, c5):
        assert min_density(c5, mask_of([0]), mask_of([0]), 0) == 0

    def test_empty_rejected(self, c5):
        with pytest.raises(EmptySet):
            min_density(c5, 0, c5.vertices, 0)
        with pytest.raises(EmptySet):
            min_density(c5, c5.vertices, 0, 0)

    def test_monotone_in_x(self):
        c = random_colouring(20, 2, 1)
        full = c.vertices
        sub = mask_of(range(10))
        for i in range(2):
            assert min_density(c, sub, full, i) >= min_density(c, full, full, i)


class TestEmbedding:
    def test_pentagon_shape(self, c5):
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        assert emb.densities == (F(2, 5), F(2, 5))
        assert emb.trimmed_sizes() == (2, 2)
        for i in range(2):
            for a in range(5):
                assert emb.trimmed[i][a].bit_count() == 2

    def test_pentagon_inner_product(self, c5):
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        assert inner_product(emb, 0, 0, 1) == -4

    def test_self_inner_product(self, c5):
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        for i in range(2):
            for x in range(5):
                assert emb.inner(i, x, x) == (1 - emb.densities[i]) / emb.alphas[i]

    def test_codegree_equivalence_spot(self, c5):
        # codegree 1 pair in colour 0 has inner product exactly 1, and the
        # threshold formula (p + lam alpha) p |Y| hits 1 at lam = 1
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        assert emb.codegree(0, 0, 2) == 1
        assert emb.inner(0, 0, 2) == 1
        lam = F(1)
        assert (F(2, 5) + lam * F(1, 10)) * F(2, 5) * 5 == 1

    def test_codegree_equivalence_exhaustive(self):
        c = random_colouring(30, 2, 8)
        alphas = [F(1, 7), F(2, 9)]
        emb = build_embedding(c, c.vertices, [c.vertices] * 2, alphas)
        pts = emb.points
        for i in range(2):
            p, a, y = emb.densities[i], emb.alphas[i], emb.y_sizes[i]
            for xa in range(len(pts)):
                for xb in range(xa, len(pts)):
                    d = emb.codegree(i, pts[xa], pts[xb])
                    v = emb.inner_by_index(i, xa, xb)
                    for lam in (F(-1), F(0), v, v + F(1, 999), v - F(1, 999)):
                        assert (v >= lam) == (d >= (p + lam * a) * p * y)

    def test_lexicographic_trim(self):
        def lowest(mask, count):
            out = 0
            for _ in range(count):
                b = mask & -mask
                out |= b
                mask ^= b
            return out

        c = random_colouring(12, 2, 3)
        emb = build_embedding(c, c.vertices, [c.vertices] * 2, [F(1, 4)] * 2)
        for i in range(2):
            m = emb.trimmed_sizes()[i]
            for a, x in enumerate(emb.points):
                assert emb.trimmed[i][a] == lowest(c.neighbourhood(x, i), m)

    def test_degenerate_density_raises(self):
        # vertex 0 has no colour-1 edges at all
        c = from_pair_function(4, 2, lambda u, v: 0 if u == 0 else 1)
        with pytest.raises(DegenerateDensity):
            build_embedding(c, c.vertices, [c.vertices] * 2, [F(1, 4)] * 2)

    def test_alpha_must_be_positive(self, c5):
        with pytest.raises(InvalidInput):
            build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(0), F(1, 4)])

    def test_inner_needs_members_of_x(self, c5):
        emb = build_embedding(c5, mask_of([0, 1, 2]), [c5.vertices] * 2, [F(1, 4)] * 2)
        with pytest.raises(InvalidVertex):
            emb.inner(0, 0, 4)


class TestSpecialFunction:
    def test_zero(self):
        assert special_f([0, 0, 0]) == 0

    def test_r1_identity(self):
        assert special_f([F(4)]) == 4
        assert special_f([F(-9, 2)]) == F(-9, 2)

    def test_r2_simple(self):
        assert special_f([F(1), F(0)]) == 3  # 1*(2 + cosh 0) + 0

    def test_minus_pi_squared(self):
        pi2 = mp.pi**2
        val = special_f([-pi2, -pi2])
        assert abs(val - (-2 * pi2)) < 1e-20

    def test_series_agreement(self):
        rng = random.Random(11)
        for _ in range(60):
            r = rng.randint(1, 3)
            xs = [F(rng.randint(-1000, 1000), 100) for _ in range(r)]  # |x| <= 10
            a = special_f(xs)
            b = special_f_series(xs, terms=40)
            assert abs(a - b) <= mp.mpf("1e-25") * max(1, abs(a))

    def test_cosh_sqrt_series_negative_is_cos(self):
        x = F(-4)
        assert abs(cosh_sqrt_series(x) - mp.cos(2)) < mp.mpf("1e-30")


class TestSpecialBounds:
    def test_origin_upper(self):
        assert check_special_bounds([F(0), F(0)]) is SpecialBranch.UPPER_BOUND_HOLDS

    def test_negative_branch_r2(self):
        assert check_special_bounds([F(-7), F(0)]) is SpecialBranch.NEGATIVE_CASE_HOLDS

    def test_negative_branch_r1(self):
        assert check_special_bounds([F(-4)]) is SpecialBranch.NEGATIVE_CASE_HOLDS

    def test_boundary_is_upper_branch(self):
        # x_i = -3r exactly stays in the first branch
        assert check_special_bounds([F(-6), F(5)]) is SpecialBranch.UPPER_BOUND_HOLDS

    def test_float_inputs(self):
        assert check_special_bounds([-10.5, 2.25]) is SpecialBranch.NEGATIVE_CASE_HOLDS

    def test_random_grid(self):
        rng = random.Random(13)
        for _ in range(300):
            r = rng.randint(1, 4)
            xs = [F(rng.randint(-20 * r, 40), rng.randint(1, 3)) for _ in range(r)]
            check_special_bounds(xs)  # raises on violation


def two_point_family():
    return VectorFamily((((F(1), F(0)), (F(0), F(1))),))


class TestMoments:
    def test_orthonormal_pair(self):
        fam = two_point_family()
        assert moment_double_sum(fam, [1]) == F(1, 2)
        assert moment_tensor(fam, [1]) == F(1, 2)

    def test_zero_exponents(self):
        fam = two_point_family()
        assert moment_double_sum(fam, [0]) == 1
        assert moment_tensor(fam, [0]) == 1

    def test_even_power_nonnegative(self, c5):
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        val = moment_double_sum(emb, [2, 0])
        assert val >= 0

    def test_embedding_tensor_equivalence(self, c5):
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, [F(1, 10)] * 2)
        for ells in ([1, 0], [0, 1], [2, 0], [1, 1], [2, 1], [2, 2]):
            assert moment_tensor(emb, ells) == moment_double_sum(emb, ells)

    def test_random_families_positive_and_equivalent(self):
        rng = random.Random(17)
        for _ in range(40):
            r = rng.randint(1, 3)
            npts = rng.randint(1, 5)
            dims = [rng.randint(1, 3) for _ in range(r)]
            fam = VectorFamily(
                tuple(
                    tuple(
                        tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dims[i]))
                        for _ in range(npts)
                    )
                    for i in range(r)
                )
            )
            ells = [rng.randint(0, 2) for _ in range(r)]
            if sum(ells) > 4:
                continue
            ds = moment_double_sum(fam, ells)
            assert ds >= 0
            assert moment_tensor(fam, ells) == ds

    def test_order_cap(self):
        fam = two_point_family()
        with pytest.raises(TensorTooLarge):
            moment_tensor(fam, [5])

    def test_dim_cap(self):
        vec = tuple(F(1) for _ in range(33))
        fam = VectorFamily(((vec,),))
        with pytest.raises(TensorTooLarge):
            moment_tensor(fam, [1])

    def test_negative_exponent_rejected(self):
        with pytest.raises(InvalidInput):
            moment_double_sum(two_point_family(), [-1])


class TestWitness:
    def test_singleton_x(self, c5):
        emb = build_embedding(c5, mask_of([0]), [c5.vertices] * 2, [F(1, 10)] * 2)
        rep = find_lambda_witness(emb)
        floor = min(emb.self_inner(i) for i in range(2))
        assert rep.lam >= floor
        assert rep.q == 1

    def test_pentagon_witness_recount(self, c5):
        alphas = [F(1, 10)] * 2
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, alphas)
        rep = find_lambda_witness(emb)
        assert rep.lam == 6 and rep.colour == 0 and rep.q == F(1, 5)
        verify_witness(c5, c5.vertices, [c5.vertices] * 2, alphas, rep)

    def test_minus_one_fallback_accepted(self):
        # whenever P(all coordinates >= -1) >= beta, the pair (any colour, -1)
        # satisfies the witness inequality: its required bound is exactly beta
        c = random_colouring(12, 2, 21)
        alphas = [F(1)] * 2  # alpha_i >= p_i makes every pair eligible
        emb = build_embedding(c, c.vertices, [c.vertices] * 2, alphas)
        n = emb.npoints
        beta = F(1, 3**8)
        for colour in range(2):
            in_event = sum(
                1
                for a in range(n)
                for b in range(n)
                if all(emb.inner_by_index(i, a, b) >= -1 for i in range(2))
                and emb.inner_by_index(colour, a, b) >= -1
            )
            assert F(in_event, n * n) == 1 >= beta
        # the returned witness maximises lam over all accepted candidates
        rep = find_lambda_witness(emb)
        assert rep.lam >= -1
        verify_witness(c, c.vertices, [c.vertices] * 2, alphas, rep)

    def test_random_corpus(self):
        for seed in range(12):
            n = 14 + seed
            r = 2 + seed % 2
            c = random_colouring(n, r, seed)
            alphas = [F(1, 3)] * r
            try:
                emb = build_embedding(c, c.vertices, [c.vertices] * r, alphas)
            except DegenerateDensity:
                continue
            rep = find_lambda_witness(emb)
            verify_witness(c, c.vertices, [c.vertices] * r, alphas, rep)


class TestKeyStep:
    def test_triangle_full_postconditions(self):
        c = triangle()
        alphas = [F(1, 4)]
        res = key_lemma_step(c, c.vertices, [c.vertices], alphas)
        assert res.lam == F(-2, 3)  # (1 - 4/3) / (2 * 1/4)
        assert res.x_prime.bit_count() == 2
        assert res.y_primes[0].bit_count() == 2
        assert res.met_size_bound
        chk = verify_key_step(c, c.vertices, [c.vertices], alphas, res)
        assert chk.all_ok
        # the boost inequality is exactly tight here: 1/2 = 2/3 - 1/6
        assert min_density(c, res.x_prime, res.y_primes[0], 0) == F(1, 2)

    def test_triangle_small_alpha_falls_back(self):
        c = triangle()
        res = key_lemma_step(c, c.vertices, [c.vertices], [F(1, 10)])
        assert not res.met_size_bound
        assert res.x_prime == 0
        assert res.y_primes[0].bit_count() == 2  # |Y'| = p|Y| still holds

    def test_pentagon_small_alpha_falls_back(self, c5):
        # every off-diagonal pair has a colour with codegree 0, hence an
        # inner product of -4 < -1: no off-diagonal pair is in any event
        alphas = [F(1, 10)] * 2
        emb = build_embedding(c5, c5.vertices, [c5.vertices] * 2, alphas)
        for a in range(5):
            for b in range(a + 1, 5):
                assert min(emb.inner_by_index(i, a, b) for i in range(2)) == -4
        res = key_lemma_step(c5, c5.vertices, [c5.vertices] * 2, alphas)
        assert res.x_prime == 0 and not res.met_size_bound
        assert res.lam == 6 and res.colour == 0 and res.pivot == 0
        assert all(y.bit_count() == 2 for y in res.y_primes)
        # the q|X| - 1 slack bound still holds: 1/5 * 5 - 1 = 0
        chk = verify_key_step(c5, c5.vertices, [c5.vertices] * 2, alphas, res)
        assert chk.slack_ok and chk.y_sizes_ok

    def test_two_point_instance(self):
        # X = {0, 1}; both see {2, 3} in colour 1 and each other in colour 0,
        # so the pair has maximal colour-1 codegree and X' must be the partner
        def col(u, v):
            if {u, v} in ({0, 1}, {2, 3}):
                return 0
            return 1

        c = from_pair_function(4, 2, col)
        xset = mask_of([0, 1])
        ysets = [c.vertices, c.vertices]
        alphas = [F(1, 2), F(1, 2)]
        res = key_lemma_step(c, xset, ysets, alphas)
        assert res.pivot == 0 and res.colour == 1 and res.lam == 1
        assert res.x_prime == mask_of([1])
        assert res.met_size_bound
        chk = verify_key_step(c, xset, ysets, alphas, res)
        assert chk.all_ok
        # boost inequality re-derived from scratch
        p1 = min_density(c, xset, c.vertices, 1)
        assert min_density(c, res.x_prime, res.y_primes[1], 1) >= p1 + res.lam * alphas[1]

    def test_random_postcondition_oracle(self):
        done = 0
        for seed in range(30):
            n = 16 + (seed * 3) % 20
            r = 2 + seed % 2
            c = random_colouring(n, r, 1000 + seed)
            full = c.vertices
            try:
                densities = [min_density(c, full, full, i) for i in range(r)]
            except EmptySet:
                continue
            if any(p == 0 for p in densities):
                continue
            alphas = [p / 2 for p in densities]
            res = key_lemma_step(c, full, [full] * r, alphas)
            chk = verify_key_step(c, full, [full] * r, alphas, res)
            assert chk.y_sizes_ok and chk.slack_ok
            if res.met_size_bound:
                assert chk.all_ok
                done += 1
        assert done >= 25  # the full postconditions hold on nearly all seeds
