"""SVM stage: fixed-point decision values against the double-precision
oracle, argmax classification, and the kernel/decision/classification
constraint blocks including wrong-label unsatisfiability and the
value-index binding soundness."""

import math
import random

import pytest

from fixtures import enc, make_fixture, sample_for, to_fxp, float_pipeline
from ezdps.field import RISTRETTO_ORDER
from ezdps.fixedpoint import FixedPoint
from ezdps.gadgets import lc_of
from ezdps.r1cs import Builder, ConstraintSystem
from ezdps.svm import (DegenerateTieError, SvmClass, SvmError, SvmParams,
                       SvmVars, svm_class_rows, svm_classify, svm_constraints,
                       svm_decision_values, svm_kernel_rows, svm_witness)

P = RISTRETTO_ORDER
N_BITS = 40


def toy_params(k=2, gamma=0.5):
    return SvmParams(classes=[
        SvmClass(support_vectors=[[enc(0)] * k], coef=[enc(1)], bias=enc(0)),
    ], gamma=enc(gamma))


class TestDecisionValues:
    def test_zero_distance_kernel_is_one(self):
        params = SvmParams(classes=[SvmClass(
            support_vectors=[[enc(0.5), enc(-0.25)]], coef=[enc(1)],
            bias=enc(0))], gamma=enc(0.5))
        fs, _, kernels, _ = svm_decision_values([enc(0.5), enc(-0.25)],
                                                params, N_BITS)
        assert abs(fs[0].to_float() - 1.0) < 2**-20
        assert abs(kernels[0][0] - enc(1).raw) < 16

    def test_zero_coefficients_leave_bias(self):
        params = SvmParams(classes=[
            SvmClass(support_vectors=[[enc(1), enc(2)]], coef=[enc(0)],
                     bias=enc(0.75)),
            SvmClass(support_vectors=[[enc(3), enc(1)]], coef=[enc(0)],
                     bias=enc(-0.5))], gamma=enc(0.1))
        fs, _, _, _ = svm_decision_values([enc(0), enc(0)], params, N_BITS)
        assert fs[0] == enc(0.75) and fs[1] == enc(-0.5)

    def test_random_models_match_double_oracle(self):
        rng = random.Random(70)
        k = 4
        for _ in range(10):
            classes = []
            for _ in range(2):
                svs = [[rng.uniform(-2, 2) for _ in range(k)] for _ in range(3)]
                coefs = [rng.uniform(-1, 1) for _ in range(3)]
                bias = rng.uniform(-0.5, 0.5)
                classes.append((svs, coefs, bias))
            gamma = 0.05
            params = SvmParams(classes=[
                SvmClass(support_vectors=[[enc(v) for v in sv] for sv in svs],
                         coef=[enc(c) for c in coefs], bias=enc(bias))
                for svs, coefs, bias in classes], gamma=enc(gamma))
            x = [rng.uniform(-2, 2) for _ in range(k)]
            fs, _, _, _ = svm_decision_values([enc(v) for v in x], params,
                                              N_BITS)
            for fv, (svs, coefs, bias) in zip(fs, classes):
                want = bias + sum(
                    c * math.exp(-gamma * sum((a - s) ** 2
                                              for a, s in zip(x, sv)))
                    for sv, c in zip(svs, coefs))
                assert abs(fv.to_float() - want) < 2**-10

    def test_dimension_mismatch(self):
        with pytest.raises(SvmError):
            svm_decision_values([enc(0)] * 3, toy_params(k=2), N_BITS)

    def test_exponent_range_guard(self):
        params = SvmParams(classes=[SvmClass(
            support_vectors=[[enc(2**13)]], coef=[enc(1)], bias=enc(0))],
            gamma=enc(1.0))
        with pytest.raises(SvmError):
            svm_decision_values([enc(-(2**13))], params, 64)


class TestClassify:
    def test_argmax_example(self):
        y, f_bar, sigma = svm_classify([enc(0.2), enc(0.9), enc(-0.1)])
        assert y == 2
        assert f_bar[0] == enc(0.9).raw
        assert sigma == [2, 1, 3]

    def test_exact_tie_rejected(self):
        with pytest.raises(DegenerateTieError):
            svm_classify([enc(0.5), enc(0.5)])

    def test_random_against_linear_scan(self):
        rng = random.Random(71)
        for _ in range(100):
            vals = [enc(rng.uniform(-3, 3)) for _ in range(8)]
            y, f_bar, sigma = svm_classify(vals)
            want = max(range(8), key=lambda i: (vals[i].raw, -i)) + 1
            assert y == want
            assert sorted(f_bar) == sorted(v.raw for v in vals)


def build_svm_system(params, x, y_claim, beta, alpha_max, trace=None,
                     witness_label=False):
    trace = trace or svm_witness(x, params, N_BITS)
    cs = ConstraintSystem()
    b = Builder(cs, proving=True)
    x_vars = [b.pub(v.raw % P) for v in x]
    sv_vars = [[[b.wit(v.raw % P) for v in sv] for sv in c.support_vectors]
               for c in params.classes]
    coef_vars = [[b.wit(v.raw % P) for v in c.coef] for c in params.classes]
    bias_vars = [b.wit(c.bias.raw % P) for c in params.classes]
    s = params.s
    lo = 0 if witness_label else 1
    sv = SvmVars(
        exponents=[[b.wit(v % P) for v in row] for row in trace.exponents],
        kernels=[[b.wit(v % P) for v in row] for row in trace.kernels],
        products=[[b.wit(v % P) for v in row] for row in trace.products],
        f_bar=[b.wit(trace.f_bar[i] % P) for i in range(lo, s)],
        sigma=[b.wit(trace.sigma[i] % P) for i in range(lo, s)],
    )
    if witness_label:
        sv.label_var = sv.sigma[0]
    svm_constraints(b, [lc_of(v) for v in x_vars], sv_vars, coef_vars,
                    bias_vars, sv, params, None if witness_label else y_claim,
                    beta, alpha_max, N_BITS)
    cs.freeze()
    return cs, b


class TestConstraints:
    def test_honest_trace_satisfies_and_counts(self):
        rng = random.Random(72)
        model, fm, centers, rng2 = make_fixture(m=16, s=2, k=4, seed=21)
        params = model.svm
        x = to_fxp([0.3, -0.2, 0.1, 0.5])
        trace = svm_witness(x, params, N_BITS)
        cs, b = build_svm_system(params, x, trace.label, rng.randrange(P),
                                 rng.randrange(P), trace)
        ok, label = cs.is_satisfied(b.assignment())
        assert ok, label
        n, k, t, s = N_BITS, params.k, params.t, params.s
        assert cs.count_prefix("svm.kernel") == svm_kernel_rows(n, k, t, s)
        assert cs.count_prefix("svm.class") == svm_class_rows(n, s)
        assert cs.count_prefix("svm.decision") == t

    def test_wrong_label_unsatisfiable(self):
        rng = random.Random(73)
        model, _, _, _ = make_fixture(m=16, s=4, k=4, sv_per_class=2, seed=22)
        params = model.svm
        x = to_fxp([0.4, 0.1, -0.3, 0.2])
        trace = svm_witness(x, params, N_BITS)
        honest = trace.label
        for wrong in range(1, params.s + 1):
            if wrong == honest:
                continue
            cs, b = build_svm_system(params, x, wrong, rng.randrange(P),
                                     rng.randrange(P), trace)
            assert not cs.is_satisfied(b.assignment())[0]

    def test_100_random_models_honest_accepts_wrong_labels_fail(self):
        rng = random.Random(76)
        for _ in range(100):
            k, s = 2, 2
            params = SvmParams(classes=[
                SvmClass(
                    support_vectors=[[enc(rng.uniform(-2, 2)) for _ in range(k)]],
                    coef=[enc(rng.uniform(0.2, 1.0))],
                    bias=enc(rng.uniform(-0.3, 0.3)))
                for _ in range(s)], gamma=enc(0.2))
            x = to_fxp([rng.uniform(-2, 2) for _ in range(k)])
            trace = svm_witness(x, params, N_BITS)
            beta, amax = rng.randrange(P), rng.randrange(P)
            cs, b = build_svm_system(params, x, trace.label, beta, amax, trace)
            assert cs.is_satisfied(b.assignment())[0]
            wrong = 1 if trace.label == 2 else 2
            cs2, b2 = build_svm_system(params, x, wrong, beta, amax, trace)
            assert not cs2.is_satisfied(b2.assignment())[0]

    def test_corrupt_kernel_value_rejected(self):
        rng = random.Random(74)
        model, _, _, _ = make_fixture(m=16, s=2, k=4, seed=23)
        params = model.svm
        x = to_fxp([0.4, 0.1, -0.3, 0.2])
        alpha_max, beta = rng.randrange(P), rng.randrange(P)
        cs, b = build_svm_system(params, x, None, beta, alpha_max,
                                 witness_label=True)
        assert cs.is_satisfied(b.assignment())[0]
        witness = [b.values[v] for v in cs.z_order()[cs.num_public + 1:]]
        # kernel values sit right after the model section and the exponents
        t = params.t
        n_model = sum(len(c.coef) * (params.k + 1) + 1 for c in params.classes)
        kern_pos = n_model + t
        bad = list(witness)
        bad[kern_pos] = (bad[kern_pos] + 1) % P
        cs2 = ConstraintSystem()
        b2 = Builder(cs2, proving=False, feed=iter(bad))
        _rebuild_svm(b2, params, x, beta, alpha_max)
        cs2.freeze()
        assert not cs2.is_satisfied(b2.assignment())[0]

    def test_value_index_binding_soundness(self):
        # swapping two committed (value, index) pairs inconsistently must
        # break the permutation check for nearly all beta draws
        rng = random.Random(75)
        model, _, _, _ = make_fixture(m=16, s=4, k=4, sv_per_class=2, seed=24)
        params = model.svm
        x = to_fxp([0.4, 0.1, -0.3, 0.2])
        trace = svm_witness(x, params, N_BITS)
        fails = 0
        trials = 1000
        f = [v.raw % P for v in trace.f]
        for _ in range(trials):
            beta = rng.randrange(P)
            # honest multiset of bound pairs
            honest = sorted((f[c] + beta * (c + 1)) % P for c in range(4))
            # mismatched pairing: swap the indices of slots 2 and 3
            forged = sorted([(f[0] + beta) % P, (f[1] + beta * 2) % P,
                             (f[2] + beta * 4) % P, (f[3] + beta * 3) % P])
            fails += honest != forged
        assert fails >= 999

    def test_label_agreement_with_double_oracle(self):
        model, fm, centers, rng = make_fixture(m=16, s=2, k=4, seed=25)
        agree = 0
        total = 60
        for i in range(total):
            xf = sample_for(rng, centers, i % 2)
            x = to_fxp(xf)
            trace = svm_witness(
                [FixedPoint(v) for v in _project_via_model(model, x)],
                model.svm, N_BITS)
            _, y_oracle = float_pipeline(xf, fm)
            agree += trace.label == y_oracle
        assert agree >= 0.98 * total


def _project_via_model(model, x):
    from ezdps.dwt import dwt_witness
    from ezdps.pca import pca_project
    dt = dwt_witness(x, model.dwt)
    xhat = [FixedPoint(v) for v in dt.output()]
    return [v.raw for v in pca_project(xhat, model.pca)]


def _rebuild_svm(b, params, x, beta, alpha_max):
    x_vars = [b.pub(v.raw % P) for v in x]
    sv_vars = [[[b.wit() for _ in sv] for sv in c.support_vectors]
               for c in params.classes]
    coef_vars = [[b.wit() for _ in c.coef] for c in params.classes]
    bias_vars = [b.wit() for c in params.classes]
    s = params.s
    sv = SvmVars(
        exponents=[[b.wit() for _ in c.coef] for c in params.classes],
        kernels=[[b.wit() for _ in c.coef] for c in params.classes],
        products=[[b.wit() for _ in c.coef] for c in params.classes],
        f_bar=[b.wit() for _ in range(s)],
        sigma=[b.wit() for _ in range(s)],
    )
    sv.label_var = sv.sigma[0]
    svm_constraints(b, [lc_of(v) for v in x_vars], sv_vars, coef_vars,
                    bias_vars, sv, params, None, beta, alpha_max, N_BITS)
