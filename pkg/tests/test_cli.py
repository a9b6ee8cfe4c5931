"""Command-line behavior: exit codes (0 accept, 1 reject, 2 format/usage),
JSON output, and the inspect command's accounting."""

import json

import pytest

from fixtures import fixture_pp, make_fixture, sample_for, to_fxp
from ezdps.cli import main
from ezdps.pipeline import dps_infer, save_model, save_sample
from ezdps.zkpoa import save_dataset


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Model, sample and dataset files for a small fixture."""
    tmp = tmp_path_factory.mktemp("cli")
    model, fm, centers, rng = make_fixture(m=8, s=2, k=3, sv_per_class=2,
                                           seed=51)
    save_model(model, str(tmp / "model.json"))
    x = to_fxp(sample_for(rng, centers, 0))
    save_sample(x, str(tmp / "sample.json"))
    pp = fixture_pp(n_bits=64)
    samples = [to_fxp(sample_for(rng, centers, i % 2)) for i in range(5)]
    labels = [dps_infer(model, s, pp)[0] for s in samples]
    save_dataset(samples, labels, str(tmp / "dataset.json"))
    return tmp


def run(workdir, *argv):
    return main([str(a) for a in argv])


class TestCommit:
    def test_commit_roundtrip(self, workdir, capsys):
        code = run(workdir, "commit", "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--commitment", workdir / "cm.json")
        assert code == 0
        digest1 = capsys.readouterr().out.strip()
        assert len(digest1) == 64 and int(digest1, 16) >= 0
        # rerun with the same secret file reproduces the digest
        code = run(workdir, "commit", "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--commitment", workdir / "cm.json")
        assert code == 0
        assert capsys.readouterr().out.strip() == digest1

    def test_truncated_model_is_format_error(self, workdir, tmp_path, capsys):
        bad = tmp_path / "trunc.json"
        bad.write_text((workdir / "model.json").read_text()[:100])
        code = run(workdir, "commit", "--model", bad,
                   "--secret", tmp_path / "s.json",
                   "--commitment", tmp_path / "c.json")
        assert code == 2


class TestProveVerify:
    def test_prove_then_verify_accepts(self, workdir, capsys):
        assert run(workdir, "commit", "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--commitment", workdir / "cm.json") == 0
        assert run(workdir, "prove", "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--input", workdir / "sample.json",
                   "--proof", workdir / "proof.bin") == 0
        capsys.readouterr()
        code = run(workdir, "verify", "--input", workdir / "sample.json",
                   "--commitment", workdir / "cm.json",
                   "--proof", workdir / "proof.bin")
        assert code == 0
        assert "ACCEPT" in capsys.readouterr().out

    def test_mismatched_commitment_rejects(self, workdir, tmp_path, capsys):
        # commit under a different secret: verify must REJECT with exit 1
        assert run(workdir, "commit", "--model", workdir / "model.json",
                   "--secret", tmp_path / "other-secret.json",
                   "--commitment", tmp_path / "other-cm.json") == 0
        capsys.readouterr()
        code = run(workdir, "verify", "--input", workdir / "sample.json",
                   "--commitment", tmp_path / "other-cm.json",
                   "--proof", workdir / "proof.bin")
        assert code == 1
        assert "REJECT" in capsys.readouterr().out

    def test_corrupted_proof_file_is_format_error(self, workdir, tmp_path):
        raw = (workdir / "proof.bin").read_bytes()
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"XXXX" + raw[4:])
        code = run(workdir, "verify", "--input", workdir / "sample.json",
                   "--commitment", workdir / "cm.json", "--proof", bad)
        assert code == 2

    def test_json_output(self, workdir, capsys):
        code = run(workdir, "--json", "verify",
                   "--input", workdir / "sample.json",
                   "--commitment", workdir / "cm.json",
                   "--proof", workdir / "proof.bin")
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert out["accept"] is True


class TestAccuracyCommands:
    def test_prove_and_verify_accuracy(self, workdir, capsys):
        assert run(workdir, "commit", "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--commitment", workdir / "cm.json") == 0
        assert run(workdir, "prove-accuracy",
                   "--model", workdir / "model.json",
                   "--secret", workdir / "secret.json",
                   "--dataset", workdir / "dataset.json",
                   "--psi", "1.0", "--proof", workdir / "poa.bin") == 0
        capsys.readouterr()
        code = run(workdir, "verify-accuracy",
                   "--dataset", workdir / "dataset.json", "--psi", "1.0",
                   "--commitment", workdir / "cm.json",
                   "--proof", workdir / "poa.bin")
        assert code == 0
        assert "ACCEPT" in capsys.readouterr().out


class TestInspect:
    def test_counts_table(self, workdir, capsys):
        code = run(workdir, "--json", "inspect", "--model",
                   workdir / "model.json")
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        # m=8, c=4, k=3, s=2, t=4, n=64
        assert out["counts"]["pca"] == 8
        assert out["counts"]["dwt_threshold"] == (3 * 64 + 9) * (8 - 2)
        assert out["counts"]["svm_kernel"] == (2 * 64 + 3) * 4 + 2 * 2
        assert out["baseline"]["baseline_pca"] == 8 * 3

    def test_human_output(self, workdir, capsys):
        code = run(workdir, "inspect", "--model", workdir / "model.json")
        assert code == 0
        text = capsys.readouterr().out
        assert "dwt thresholding" in text and "generic baseline" in text

    def test_reference_dimension_instance(self, tmp_path, capsys):
        # m=750, k=33, s=4, t=54: PCA 750 vs baseline 24750, thresholding
        # 150348 vs 248336
        from ezdps.pipeline import AccountingDims, save_model, synthetic_model
        dims = AccountingDims(m=750, c=4, k=33, s=4, t=54, n=64)
        save_model(synthetic_model(dims), str(tmp_path / "ucr.json"))
        code = run(tmp_path, "--json", "inspect",
                   "--model", tmp_path / "ucr.json")
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert out["counts"]["pca"] == 750
        assert out["baseline"]["baseline_pca"] == 24750
        assert out["counts"]["dwt_threshold"] == 150348
        assert out["baseline"]["baseline_dwt_threshold"] == 248336
