import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

import turbsynth as ts
from turbsynth import dataset


def make_corpus(root, n_seq=4, n_frames=2, size=24):
    rng = np.random.default_rng(8)
    for s in range(n_seq):
        d = Path(root) / f"seq_{s:03d}"
        d.mkdir(parents=True)
        for i in range(n_frames):
            ts.write_image(d / f"{i:03d}.png", rng.random((size, size)))


def tree_digest(root):
    """Relative-path -> sha256 map over every file under root."""
    out = {}
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(
                p.read_bytes()).hexdigest()
    return out


@pytest.fixture
def corpus(tmp_path):
    src = tmp_path / "src"
    make_corpus(src)
    return src


@pytest.fixture(autouse=True)
def pinned_epoch(monkeypatch):
    """Pin the manifest timestamp so byte-level comparisons make sense."""
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


class TestDiscoveryAndSplit:
    def test_discovery_sorted(self, corpus):
        seqs = dataset.discover_sequences(corpus)
        assert [s for s, _ in seqs] == [f"seq_{i:03d}" for i in range(4)]
        assert all(len(frames) == 2 for _, frames in seqs)

    def test_empty_source_rejected(self, tmp_path):
        with pytest.raises(ts.ValidationError):
            dataset.discover_sequences(tmp_path)

    def test_split_deterministic_and_sized(self):
        ids = [f"s{i:02d}" for i in range(20)]
        a = dataset.split_sequences(ids, 42, 0.7846)
        b = dataset.split_sequences(list(reversed(ids)), 42, 0.7846)
        assert a == b
        assert sum(1 for v in a.values() if v == "train") == 15
        c = dataset.split_sequences(ids, 43, 0.7846)
        assert a != c

    def test_default_ratio(self):
        ids = [f"s{i:04d}" for i in range(5083)]
        split = dataset.split_sequences(ids, 7)
        assert sum(1 for v in split.values() if v == "train") == 3988


class TestGenerateDataset:
    def test_layout_and_manifest(self, corpus, tmp_path):
        out = tmp_path / "out"
        manifest = ts.generate_dataset(corpus, out, master_seed=3,
                                       split_ratio=0.5)
        assert manifest["n_sequences"] == 4
        assert manifest["n_train"] == 2 and manifest["n_test"] == 2
        assert manifest["n_failed"] == 0
        for rec in manifest["sequences"]:
            seq_dir = out / rec["split"] / rec["id"]
            for kind in ("gt", "tilt", "blur", "turb"):
                files = sorted((seq_dir / kind).glob("*.png"))
                assert [f.name for f in files] == ["000000.png", "000001.png"]
            marker = json.loads((seq_dir / ".complete").read_text())
            assert len(marker["files"]) == 8
        disk = json.loads((out / "manifest.json").read_text())
        assert disk == manifest

    def test_per_sequence_configs_differ(self, corpus, tmp_path):
        manifest = ts.generate_dataset(corpus, tmp_path / "o", master_seed=3)
        cn2s = {rec["config"]["cn2"] for rec in manifest["sequences"]}
        assert len(cn2s) == 4

    def test_reruns_byte_identical(self, corpus, tmp_path):
        ts.generate_dataset(corpus, tmp_path / "a", master_seed=9)
        ts.generate_dataset(corpus, tmp_path / "b", master_seed=9)
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_master_seed_matters(self, corpus, tmp_path):
        ts.generate_dataset(corpus, tmp_path / "a", master_seed=1)
        ts.generate_dataset(corpus, tmp_path / "b", master_seed=2)
        a = tree_digest(tmp_path / "a")
        b = tree_digest(tmp_path / "b")
        assert a != b

    def test_worker_count_invariant(self, corpus, tmp_path):
        ts.generate_dataset(corpus, tmp_path / "w1", master_seed=5, workers=1)
        ts.generate_dataset(corpus, tmp_path / "w2", master_seed=5, workers=3)
        assert tree_digest(tmp_path / "w1") == tree_digest(tmp_path / "w2")

    def test_existing_run_requires_resume(self, corpus, tmp_path):
        out = tmp_path / "out"
        ts.generate_dataset(corpus, out, master_seed=3)
        with pytest.raises(ts.ValidationError, match="resume"):
            ts.generate_dataset(corpus, out, master_seed=3)

    def test_resume_param_mismatch_rejected(self, corpus, tmp_path):
        out = tmp_path / "out"
        ts.generate_dataset(corpus, out, master_seed=3)
        with pytest.raises(ts.ValidationError, match="differ"):
            ts.generate_dataset(corpus, out, master_seed=4, resume=True)

    def test_config_row_and_overrides_recorded(self, corpus, tmp_path):
        manifest = ts.generate_dataset(
            corpus, tmp_path / "o", master_seed=3, config_row=1,
            overrides={"exposure_ms": 4.0})
        for rec in manifest["sequences"]:
            assert rec["row_index"] == 1
            assert rec["config"]["exposure_time"] == pytest.approx(0.004)


class TestResume:
    def test_resume_completes_partial_run(self, corpus, tmp_path):
        ref = tmp_path / "ref"
        ts.generate_dataset(corpus, ref, master_seed=6)

        out = tmp_path / "out"
        ts.generate_dataset(corpus, out, master_seed=6)
        # simulate a crash: drop two sequences, corrupt one output of a third
        ref_manifest = json.loads((out / "manifest.json").read_text())
        import shutil
        recs = ref_manifest["sequences"]
        shutil.rmtree(out / recs[0]["split"] / recs[0]["id"])
        (out / recs[1]["split"] / recs[1]["id"] / ".complete").unlink()
        victim = out / recs[2]["split"] / recs[2]["id"] / "turb" / "000001.png"
        victim.write_bytes(b"garbage")
        (out / "manifest.json").unlink()

        manifest = ts.resume(out)
        assert manifest["n_failed"] == 0
        assert tree_digest(out) == tree_digest(ref)

    def test_resume_without_run_file(self, tmp_path):
        with pytest.raises(ts.ValidationError):
            ts.resume(tmp_path)


class TestFailureIsolation:
    def test_bad_sequence_recorded_not_fatal(self, corpus, tmp_path):
        # one sequence whose frames cannot be decoded
        bad = corpus / "seq_bad"
        bad.mkdir()
        (bad / "000.png").write_bytes(b"not a png")
        manifest = ts.generate_dataset(corpus, tmp_path / "o", master_seed=3)
        assert manifest["n_failed"] == 1
        failed = [r for r in manifest["sequences"] if r["status"] != "ok"]
        assert failed[0]["id"] == "seq_bad"
        assert "error" in failed[0]

    def test_all_failures_raise(self, tmp_path):
        src = tmp_path / "src"
        (src / "only").mkdir(parents=True)
        (src / "only" / "000.png").write_bytes(b"junk")
        with pytest.raises(ts.DatasetError):
            ts.generate_dataset(src, tmp_path / "o", master_seed=3)


class TestTimestamp:
    def test_source_date_epoch_honored(self, corpus, tmp_path):
        manifest = ts.generate_dataset(corpus, tmp_path / "o", master_seed=3)
        assert manifest["creation_timestamp"] == 1700000000.0

    def test_wall_clock_fallback(self, corpus, tmp_path, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH")
        import time
        before = time.time()
        manifest = ts.generate_dataset(corpus, tmp_path / "o", master_seed=3)
        assert before <= manifest["creation_timestamp"] <= time.time()
