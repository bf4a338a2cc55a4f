import itertools
from fractions import Fraction

import numpy as np
import pytest

from ncupper.algebra import (AlgebraSpec, GeneratorSpec, Letter, NCPolynomial,
                             Word, canonicalize, star, words_up_to)
from ncupper.errors import InputError
from ncupper.haar import haar_sample
from ncupper.states import (CanonicalTrace, Combination, FreeProductState,
                            HaarTrace, TensorProductState, evaluate_state,
                            make_increasing)


def w(algebra, text):
    from ncupper.problems import parse_word_tokens
    return parse_word_tokens(text, algebra)


@pytest.fixture
def chsh_state():
    psi = HaarTrace(1)
    return TensorProductState(((0, psi), (1, psi)))


class TestCanonicalTrace:
    def test_unit(self, herm_algebra):
        assert evaluate_state(CanonicalTrace(), Word(), herm_algebra) == 1

    def test_nontrivial_word(self, herm_algebra):
        assert evaluate_state(CanonicalTrace(), w(herm_algebra, "b1 b2"),
                              herm_algebra) == 0

    def test_word_reducing_to_unit(self, unitary_algebra):
        assert evaluate_state(CanonicalTrace(), w(unitary_algebra, "u1 u1*"),
                              unitary_algebra) == 1


class TestHaarTrace:
    def test_single_unitary_letter(self, unitary_algebra):
        for d in (1, 2, 3):
            assert evaluate_state(HaarTrace(d), w(unitary_algebra, "u1"),
                                  unitary_algebra) == 0

    def test_commutator_quarter(self, unitary_algebra):
        got = evaluate_state(HaarTrace(2), w(unitary_algebra, "u1 u2 u1* u2*"),
                             unitary_algebra)
        assert got == Fraction(1, 4)

    def test_herm_letter_zero(self, herm_algebra):
        for d in (1, 2):
            assert evaluate_state(HaarTrace(d), w(herm_algebra, "b1"),
                                  herm_algebra) == 0

    def test_mixed_kinds_rejected(self):
        algebra = AlgebraSpec((GeneratorSpec("u", "unitary", 0),
                               GeneratorSpec("b", "hermitian-unitary", 0)))
        with pytest.raises(InputError):
            evaluate_state(HaarTrace(1), w(algebra, "u b"), algebra)


class TestTensorProduct:
    def test_factorization(self, bipartite_algebra, chsh_state):
        assert evaluate_state(chsh_state, w(bipartite_algebra, "b1 c1"),
                              bipartite_algebra) == 0

    def test_agrees_with_product(self, bipartite_algebra, chsh_state):
        v = evaluate_state(chsh_state, w(bipartite_algebra, "b1 b2 c1 c2"),
                           bipartite_algebra)
        va = evaluate_state(HaarTrace(1), w(bipartite_algebra, "b1 b2"),
                            bipartite_algebra)
        vb = evaluate_state(HaarTrace(1), w(bipartite_algebra, "c1 c2"),
                            bipartite_algebra)
        assert v == va * vb

    def test_missing_factor(self, bipartite_algebra):
        state = TensorProductState(((0, HaarTrace(1)),))
        with pytest.raises(InputError):
            evaluate_state(state, Word(), bipartite_algebra)

    def test_mc_consistency(self, bipartite_algebra, chsh_state):
        # direct Monte Carlo of the tensored model: sample each factor's
        # reflections independently, average the product of normalized traces
        rng = np.random.default_rng(31)
        samples = 40000
        sig = np.diag([1.0, -1.0]).astype(complex)
        words = ["b1 c1", "b1 b2 c1", "b1 b2 b1 c2 c1 c2"]
        us = {g: haar_sample(rng, samples, 2)
              for g in ("b1", "b2", "c1", "c2")}
        refl = {g: us[g] @ sig @ us[g].conj().transpose(0, 2, 1) for g in us}
        for text in words:
            word = w(bipartite_algebra, text)
            vals = np.ones(samples)
            for tag in (0, 1):
                sub = [l.gen for l in word.letters
                       if bipartite_algebra.generator(l.gen).factor == tag]
                if not sub:
                    continue
                acc = refl[sub[0]]
                for g in sub[1:]:
                    acc = acc @ refl[g]
                vals = vals * np.einsum("...ii->...", acc).real / 2
            est = vals.mean()
            err = vals.std(ddof=1) / np.sqrt(samples)
            exact = float(evaluate_state(chsh_state, word, bipartite_algebra))
            assert abs(exact - est) <= 5 * err + 1e-10


def free_group_trace(word: Word, algebra) -> Fraction:
    """Oracle: canonical trace of the free group, 1 iff the word reduces to
    the identity in the free group (no other relations apply)."""
    return Fraction(1) if canonicalize(word, algebra).is_identity else Fraction(0)


class TestFreeProduct:
    def test_free_group_delta_length6(self, unitary_algebra):
        state = FreeProductState(((frozenset({"u1"}), CanonicalTrace()),
                                  (frozenset({"u2"}), CanonicalTrace())))
        letters = [Letter("u1", False), Letter("u1", True),
                   Letter("u2", False), Letter("u2", True)]
        for length in range(7):
            for combo in itertools.product(letters, repeat=length):
                word = Word(combo)
                got = evaluate_state(state, word, unitary_algebra)
                assert got == free_group_trace(word, unitary_algebra)

    def test_commutator_zero(self, unitary_algebra):
        state = FreeProductState(((frozenset({"u1"}), CanonicalTrace()),
                                  (frozenset({"u2"}), CanonicalTrace())))
        assert evaluate_state(state, w(unitary_algebra, "u1 u2 u1* u2*"),
                              unitary_algebra) == 0

    def test_uncovered_generator(self, unitary_algebra):
        state = FreeProductState(((frozenset({"u1"}), CanonicalTrace()),))
        with pytest.raises(InputError):
            evaluate_state(state, w(unitary_algebra, "u2"), unitary_algebra)


class TestMakeIncreasing:
    def test_d1_identity_weight(self):
        out = make_increasing([HaarTrace(1)])
        assert out[0].terms == ((Fraction(1), HaarTrace(1)),)

    def test_d2_weights(self):
        out = make_increasing([HaarTrace(1), HaarTrace(2)])
        assert out[1].terms == ((Fraction(2, 3), HaarTrace(1)),
                                (Fraction(1, 3), HaarTrace(2)))

    def test_weights_sum_to_one(self):
        base = [HaarTrace(d) for d in range(1, 7)]
        for comb in make_increasing(base):
            assert sum(weight for weight, _ in comb.terms) == 1

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            make_increasing([])


def _bundled_states(algebra):
    """State configurations exercised by the property tests."""
    psi1 = HaarTrace(1)
    inc2 = make_increasing([HaarTrace(1), HaarTrace(2)])[-1]
    return [
        CanonicalTrace(),
        psi1,
        inc2,
        TensorProductState(((0, psi1), (1, psi1))) if len(algebra.factor_tags) > 1 else psi1,
    ]


class TestStateProperties:
    @pytest.mark.parametrize("subset", [["b1", "b2"], ["b1", "b2", "c1", "c2"]])
    def test_unitality_star_symmetry_gram_psd(self, bipartite_algebra, subset):
        basis = words_up_to(bipartite_algebra, subset, 2)
        for state in _bundled_states(bipartite_algebra):
            if isinstance(state, (HaarTrace, Combination)) and len(subset) > 2:
                continue  # single-factor Haar states only see one factor
            assert evaluate_state(state, Word(), bipartite_algebra) == 1
            gram = []
            for u in basis:
                row = []
                for v in basis:
                    word = Word(tuple(
                        Letter(l.gen, not l.star) for l in reversed(u.letters))
                        + v.letters)
                    val = evaluate_state(state, word, bipartite_algebra)
                    sval = evaluate_state(
                        state, canonicalize(Word(tuple(
                            Letter(l.gen, not l.star)
                            for l in reversed(word.letters))), bipartite_algebra),
                        bipartite_algebra)
                    assert val == sval  # phi(w*) == phi(w), exactly
                    assert abs(val) <= 1
                    row.append(float(val))
                gram.append(row)
            eigs = np.linalg.eigvalsh(np.array(gram))
            assert eigs[0] >= -1e-9

    def test_weak_domination_witness(self, bipartite_algebra):
        # Gram(psi_{d+1}) - c_d Gram(psi_d) is PSD with
        # c_d = 2 (2^d - 1) / (2^{d+1} - 1)
        subset = ["b1", "b2", "c1", "c2"]
        basis = words_up_to(bipartite_algebra, subset, 2)
        base = [HaarTrace(1), HaarTrace(2), HaarTrace(3)]
        combs = make_increasing(base)

        def tensored(s):
            return TensorProductState(((0, s), (1, s)))

        def gram(state):
            m = []
            for u in basis:
                row = []
                for v in basis:
                    word = Word(tuple(
                        Letter(l.gen, not l.star) for l in reversed(u.letters))
                        + v.letters)
                    row.append(float(evaluate_state(state, word,
                                                    bipartite_algebra)))
                m.append(row)
            return np.array(m)

        for d in (1, 2):
            c_d = 2 * (2 ** d - 1) / (2 ** (d + 1) - 1)
            diff = gram(tensored(combs[d])) - c_d * gram(tensored(combs[d - 1]))
            assert np.linalg.eigvalsh(diff)[0] >= -1e-9
