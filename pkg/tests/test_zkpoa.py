"""Proof-of-accuracy: the accuracy operation, accept/refuse behavior at
the claimed bound, forged-trace rejection, monotonicity over the psi
grid, and the structural hiding property."""

import secrets
from fractions import Fraction

import pytest

from fixtures import make_fixture, sample_for, to_fxp
from ezdps.field import RISTRETTO_ORDER
from ezdps.pipeline import commit_model, dps_infer
from ezdps.zkpoa import (PoaError, PoaStatement, accuracy, build_poa_system,
                         poa_prove, poa_verify)

P = RISTRETTO_ORDER


@pytest.fixture(scope="module")
def poa_fixture(pp):
    """m=8 model plus a 20-sample dataset with exactly 17 correct labels
    (three ground truths deliberately flipped)."""
    model, fm, centers, rng = make_fixture(m=8, s=2, k=3, sv_per_class=2,
                                           seed=41)
    samples = [to_fxp(sample_for(rng, centers, i % 2)) for i in range(20)]
    predicted = [dps_infer(model, x, pp)[0] for x in samples]
    labels = list(predicted)
    for i in (2, 9, 15):
        labels[i] = 1 if labels[i] == 2 else 2
    assert accuracy(predicted, labels) == Fraction(17, 20)
    return model, samples, labels


class TestAccuracyOp:
    def test_all_match(self):
        assert accuracy([1, 2, 3], [1, 2, 3]) == 1

    def test_disjoint(self):
        assert accuracy([1, 1], [2, 2]) == 0

    def test_17_of_20(self):
        y = [1] * 20
        t = [1] * 17 + [2] * 3
        assert accuracy(y, t) == Fraction(85, 100)

    def test_length_mismatch(self):
        with pytest.raises(PoaError):
            accuracy([1], [1, 2])


class TestStatement:
    def test_non_integral_psi_m_rejected(self):
        with pytest.raises(PoaError):
            PoaStatement(samples=[[]] * 3, labels=[1, 1, 1],
                         psi=Fraction(1, 2))

    def test_psi_range(self):
        with pytest.raises(PoaError):
            PoaStatement(samples=[[]], labels=[1], psi=Fraction(2))


class TestProveVerify:
    def test_psi_085_accepts(self, poa_fixture, pp):
        model, samples, labels = poa_fixture
        r = secrets.token_bytes(32)
        cm = commit_model(model, r, pp)
        stmt = PoaStatement(samples=samples, labels=labels,
                            psi=Fraction(85, 100))
        bundle = poa_prove(model, stmt, pp, r)
        assert poa_verify(cm.digest, stmt, bundle, pp)

    def test_psi_090_prover_refuses(self, poa_fixture, pp):
        model, samples, labels = poa_fixture
        stmt = PoaStatement(samples=samples, labels=labels,
                            psi=Fraction(90, 100))
        with pytest.raises(PoaError):
            poa_prove(model, stmt, pp, secrets.token_bytes(32))

    def test_psi_090_forged_trace_rejected(self, poa_fixture, pp):
        # a forging prover with only 17/20 correct must leave some row
        # broken at threshold 18, whichever way it cheats
        import random

        model, samples, labels = poa_fixture
        rng = random.Random(99)
        stmt90 = PoaStatement(samples=samples, labels=labels,
                              psi=Fraction(90, 100))
        traces = [dps_infer(model, x, pp)[1] for x in samples]
        predicted = [tr.svm.label for tr in traces]
        right = [i for i in range(20) if predicted[i] == labels[i]]
        wrong = [i for i in range(20) if predicted[i] != labels[i]]
        # cheat 1: shuffle a misclassified sample into the front block with
        # honest values: the equality row over slot 18 fails
        forged_sigma = right + [wrong[0]] + wrong[1:]
        ch = {k: rng.randrange(P) for k in
              ("alpha", "alpha_bar", "alpha_pca", "beta", "alpha_max", "xi",
               "alpha_poa")}
        cs, b, mv, pv = build_poa_system(pp, model, stmt90, ch, traces=traces,
                                         sigma=forged_sigma)
        ok, label = cs.is_satisfied(b.assignment())
        assert not ok and label == "poa.correct[17]"
        # cheat 2: additionally lie about the permuted prediction value:
        # now the value-index permutation check breaks
        witness = [b.values[v] for v in cs.z_order()[cs.num_public + 1:]]
        pos_y = cs.ordinal_of(pv.y_perm[17])
        pos_t = cs.ordinal_of(pv.t_perm[17])
        forged = list(witness)
        forged[pos_y] = forged[pos_t]
        cs2, b2, _, _ = build_poa_system(pp, model, stmt90, ch, feed=forged)
        ok2, label2 = cs2.is_satisfied(b2.assignment())
        assert not ok2 and label2.startswith("poa.perm")

    def test_single_sample_full_accuracy(self, pp):
        model, fm, centers, rng = make_fixture(m=8, s=2, k=3, sv_per_class=2,
                                               seed=42)
        x = to_fxp(sample_for(rng, centers, 0))
        y, _ = dps_infer(model, x, pp)
        stmt = PoaStatement(samples=[x], labels=[y], psi=Fraction(1))
        r = secrets.token_bytes(32)
        cm = commit_model(model, r, pp)
        bundle = poa_prove(model, stmt, pp, r)
        assert poa_verify(cm.digest, stmt, bundle, pp)

    def test_swapped_ground_truth_rejected(self, poa_fixture, pp):
        model, samples, labels = poa_fixture
        r = secrets.token_bytes(32)
        cm = commit_model(model, r, pp)
        stmt = PoaStatement(samples=samples, labels=labels,
                            psi=Fraction(85, 100))
        bundle = poa_prove(model, stmt, pp, r)
        swapped = list(labels)
        swapped[0], swapped[2] = swapped[2], swapped[0]
        stmt2 = PoaStatement(samples=samples, labels=swapped,
                             psi=Fraction(85, 100))
        assert not poa_verify(cm.digest, stmt2, bundle, pp)

    def test_psi_tampered_upward_rejected(self, poa_fixture, pp):
        model, samples, labels = poa_fixture
        r = secrets.token_bytes(32)
        cm = commit_model(model, r, pp)
        stmt = PoaStatement(samples=samples, labels=labels,
                            psi=Fraction(85, 100))
        bundle = poa_prove(model, stmt, pp, r)
        stmt_up = PoaStatement(samples=samples, labels=labels,
                               psi=Fraction(90, 100))
        assert not poa_verify(cm.digest, stmt_up, bundle, pp)


class TestMonotonicity:
    def test_all_psi_grid_points_m8(self, pp):
        # exactly 6 of 8 correct: provable for psi <= 6/8, refused above
        model, fm, centers, rng = make_fixture(m=8, s=2, k=3, sv_per_class=2,
                                               seed=43)
        samples = [to_fxp(sample_for(rng, centers, i % 2)) for i in range(8)]
        predicted = [dps_infer(model, x, pp)[0] for x in samples]
        labels = list(predicted)
        for i in (1, 6):
            labels[i] = 1 if labels[i] == 2 else 2
        assert accuracy(predicted, labels) == Fraction(6, 8)
        r = secrets.token_bytes(32)
        cm = commit_model(model, r, pp)
        for hits in range(9):
            psi = Fraction(hits, 8)
            stmt = PoaStatement(samples=samples, labels=labels, psi=psi)
            if hits <= 6:
                bundle = poa_prove(model, stmt, pp, r)
                assert poa_verify(cm.digest, stmt, bundle, pp)
            else:
                with pytest.raises(PoaError):
                    poa_prove(model, stmt, pp, r)


class TestHiding:
    def test_structure_independent_of_miss_pattern(self, pp):
        # same dataset labels, two prediction patterns with equally many
        # misses: identical constraint structure under fixed challenges
        model, fm, centers, rng = make_fixture(m=8, s=2, k=3, sv_per_class=2,
                                               seed=44)
        samples = [to_fxp(sample_for(rng, centers, i % 2)) for i in range(6)]
        predicted = [dps_infer(model, x, pp)[0] for x in samples]
        ch = {k: i + 2 for i, k in enumerate(
            ("alpha", "alpha_bar", "alpha_pca", "beta", "alpha_max", "xi",
             "alpha_poa"))}

        def dump_for(miss_indices):
            labels = list(predicted)
            for i in miss_indices:
                labels[i] = 1 if labels[i] == 2 else 2
            stmt = PoaStatement(samples=samples, labels=labels,
                                psi=Fraction(4, 6))
            cs, _, _, _ = build_poa_system(pp, model, stmt, ch)
            return cs

        cs_a = dump_for((0, 3))
        cs_b = dump_for((2, 5))
        # public inputs are exactly the sample entries; the pattern lives
        # in witness variables only
        assert cs_a.num_public == 6 * 8 == cs_b.num_public
        # the ground-truth labels are public constants, so the permT rows
        # differ; every other row is structurally identical
        la = [l for l in cs_a.labels if not l.startswith("poa.permT")]
        lb = [l for l in cs_b.labels if not l.startswith("poa.permT")]
        assert la == lb
        assert len(cs_a) == len(cs_b)
