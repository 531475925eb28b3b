import numpy as np
import pytest

from labelloop import uncertainty
from labelloop.uncertainty import entropy, margin, margin_entropy, varratio

from conftest import random_simplex
from oracles import entropy_ref, margin_entropy_ref, margin_ref, varratio_ref

# Frozen from a 40-digit reference evaluation of the defining formulas.
ENTROPY_532 = 1.0296530140645735
MARGIN_ENTROPY_532 = 6.0296530140645735


class TestMargin:
    def test_direct(self):
        assert margin([0.5, 0.3, 0.2]) == pytest.approx(0.2, abs=1e-12)

    def test_one_hot(self):
        assert margin([1.0, 0.0, 0.0]) == 1.0

    def test_uniform(self):
        assert margin([0.25] * 4) == 0.0

    def test_length_one_invalid(self):
        with pytest.raises(ValueError):
            margin([1.0])


class TestEntropy:
    def test_one_hot_zero(self):
        assert entropy([1.0, 0.0, 0.0]) == 0.0

    def test_uniform_9(self):
        assert entropy([1 / 9] * 9) == pytest.approx(np.log(9), abs=1e-12)

    def test_reference_value(self):
        assert entropy([0.5, 0.3, 0.2]) == pytest.approx(ENTROPY_532, abs=1e-12)

    def test_negative_invalid(self):
        with pytest.raises(ValueError):
            entropy([1.2, -0.2])


class TestVarRatio:
    def test_one_hot(self):
        assert varratio([1.0, 0.0]) == 0.0

    def test_uniform_4(self):
        assert varratio([0.25] * 4) == 0.75

    def test_direct(self):
        assert varratio([0.5, 0.3, 0.2]) == pytest.approx(0.5, abs=1e-12)


class TestMarginEntropy:
    def test_reference_value(self):
        assert margin_entropy([0.5, 0.3, 0.2]) == pytest.approx(MARGIN_ENTROPY_532, abs=1e-12)

    def test_one_hot_anchor(self):
        assert margin_entropy([1.0, 0.0]) == pytest.approx(1.0, abs=1e-12)

    def test_exact_tie_clamped(self):
        score = margin_entropy([0.5, 0.5])
        assert np.isfinite(score)
        assert score > 1e11
        # A tie outranks any non-tied vector.
        assert score > margin_entropy([0.5 + 1e-9, 0.5 - 1e-9])

    def test_sum_not_one_rejected(self):
        with pytest.raises(ValueError):
            margin_entropy([0.6, 0.6])


class TestProperties:
    def test_matches_reference_evaluator(self, rng):
        # Mirror of the acceptance oracle at unit scale.
        for k in range(2, 11):
            probs = random_simplex(rng, 100, k)
            for p in probs:
                row = p.tolist()
                assert margin(p) == pytest.approx(margin_ref(row), abs=1e-9)
                assert entropy(p) == pytest.approx(entropy_ref(row), abs=1e-9)
                assert varratio(p) == pytest.approx(varratio_ref(row), abs=1e-9)
                assert margin_entropy(p) == pytest.approx(margin_entropy_ref(row), abs=1e-9)

    def test_ranges(self, rng):
        for k in (2, 5, 10):
            probs = random_simplex(rng, 10_000 // 3, k)
            h = entropy(probs)
            assert np.all(h >= -1e-12) and np.all(h <= np.log(k) + 1e-12)
            m = margin(probs)
            assert np.all(m >= 0) and np.all(m <= 1)
            v = varratio(probs)
            assert np.all(v >= 0) and np.all(v <= 1 - 1 / k + 1e-12)
            me = margin_entropy(probs)
            assert np.all(me >= 0) and np.all(np.isfinite(me))

    def test_permutation_equivariance(self, rng):
        probs = random_simplex(rng, 50, 6)
        perm = rng.permutation(6)
        for fn in (margin, entropy, varratio, margin_entropy):
            assert np.allclose(fn(probs), fn(probs[:, perm]), atol=1e-12)

    def test_decomposition_identity(self, rng):
        probs = random_simplex(rng, 200, 5)
        me = margin_entropy(probs)
        rebuilt = 1.0 / np.maximum(margin(probs), uncertainty.MARGIN_EPS) + entropy(probs)
        assert np.allclose(me, rebuilt, atol=1e-12)

    def test_monotone_in_margin_at_fixed_entropy(self):
        # Construct 3-class vectors [x + m, x, u] sharing one entropy value but
        # with different margins, by solving for the third mass u numerically.
        def family_member(m, target_h):
            lo, hi = 1e-9, (1.0 - m) / 3
            for _ in range(200):
                u = 0.5 * (lo + hi)
                x = (1.0 - m - u) / 2
                p = np.array([x + m, x, u])
                if entropy(p) > target_h:
                    hi = u
                else:
                    lo = u
            u = 0.5 * (lo + hi)
            x = (1.0 - m - u) / 2
            return np.array([x + m, x, u])

        target_h = 0.9
        margins = [0.1, 0.2, 0.3, 0.4]
        members = [family_member(m, target_h) for m in margins]
        entropies = [entropy(p) for p in members]
        assert np.allclose(entropies, target_h, atol=1e-6)
        scores = [margin_entropy(p) for p in members]
        assert all(a > b for a, b in zip(scores, scores[1:]))
