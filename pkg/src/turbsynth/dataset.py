"""Batch dataset generation: clean sequences in, degraded tuples out.

Layout: for every source sequence (a subdirectory of PNG frames) the
generator writes

    out_root/<split>/<sequence>/gt/000000.png      clean frames
    out_root/<split>/<sequence>/tilt/000000.png    tilt-only
    out_root/<split>/<sequence>/blur/000000.png    blur-only
    out_root/<split>/<sequence>/turb/000000.png    full degradation

plus a hidden .complete marker per finished sequence (output checksums
and the exact parameters used), a run.json with the run parameters, and
a manifest.json summarizing every sequence.

Reproducibility: each sequence's work is a pure function of the master
seed, the sequence id, and the run parameters; nothing depends on
completion order, worker count, or the clock (the manifest timestamp
honors SOURCE_DATE_EPOCH, falling back to wall time). Re-running with
resume=True verifies the markers and reprocesses only what is missing
or corrupt, yielding byte-identical results to a single uninterrupted
run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import pngio
from .config import OpticalConfig, ValidationError, config_from_dict
from .degrade import degrade_video
from .rng import STREAM_SPLIT, make_generator, sequence_seed

# Default train fraction; chosen so the benchmark-sized corpus of 5083
# sequences splits into 3988 train / 1095 test.
DEFAULT_SPLIT_RATIO = 3988 / 5083

KINDS = ("gt", "tilt", "blur", "turb")

MARKER_NAME = ".complete"
MANIFEST_NAME = "manifest.json"
RUN_FILE_NAME = "run.json"


class DatasetError(RuntimeError):
    """A dataset run that produced no usable output."""


def discover_sequences(source_root) -> list[tuple[str, list[Path]]]:
    """Sequences under source_root: sorted (id, sorted frame paths)."""
    root = Path(source_root)
    if not root.is_dir():
        raise ValidationError(f"source root {root} is not a directory")
    seqs = []
    for entry in sorted(root.iterdir()):
        if not entry.is_dir():
            continue
        frames = sorted(entry.glob("*.png"))
        if frames:
            seqs.append((entry.name, frames))
    if not seqs:
        raise ValidationError(f"no sequences (subdirectories with PNG frames) "
                              f"under {root}")
    return seqs


def split_sequences(ids, master_seed: int,
                    split_ratio: float = DEFAULT_SPLIT_RATIO) -> dict[str, str]:
    """Deterministic train/test assignment.

    Ids are sorted, shuffled by a seed-derived permutation, and the
    first floor(n * ratio) become train. Independent of discovery order
    and stable across runs with the same seed.
    """
    if not 0.0 <= split_ratio <= 1.0:
        raise ValidationError(f"split_ratio must be in [0, 1], got {split_ratio}")
    ids = sorted(ids)
    perm = make_generator(master_seed, STREAM_SPLIT).permutation(len(ids))
    n_train = math.floor(len(ids) * split_ratio)
    train = {ids[i] for i in perm[:n_train]}
    return {sid: ("train" if sid in train else "test") for sid in ids}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json_atomic(path: Path, obj) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)


def _creation_timestamp() -> float:
    # Honor the reproducible-builds convention so two runs can produce
    # byte-identical manifests when the caller pins the epoch.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return float(int(epoch))
    return time.time()


def _process_sequence(task: dict) -> dict:
    """Worker entry: degrade one sequence and write its outputs.

    Module-level (picklable) and a pure function of its task dict, so
    results are identical no matter which process runs it.
    """
    seq_id = task["id"]
    seq_dir = Path(task["out_root"]) / task["split"] / seq_id
    try:
        cfg = config_from_dict(task["config"])
        frames = [pngio.read_image(p) for p in task["frames"]]
        results = degrade_video(frames, cfg, task["seed"],
                                noise_k=task["noise_k"])
        checksums = {}
        for kind in KINDS:
            (seq_dir / kind).mkdir(parents=True, exist_ok=True)
        for i, (clean, res) in enumerate(zip(frames, results)):
            for kind in KINDS:
                img = clean if kind == "gt" else res[kind]
                rel = f"{kind}/{i:06d}.png"
                pngio.write_image(seq_dir / rel, img)
                checksums[rel] = _sha256(seq_dir / rel)
        record = {
            "id": seq_id,
            "split": task["split"],
            "n_frames": len(frames),
            "seed": task["seed"],
            "row_index": task["row_index"],
            "config": task["config"],
            "status": "ok",
        }
        _write_json_atomic(seq_dir / MARKER_NAME,
                           {**record, "files": checksums})
        return record
    except Exception as exc:  # per-sequence isolation: record, move on
        return {"id": seq_id, "split": task["split"],
                "n_frames": len(task["frames"]),
                "seed": task["seed"], "row_index": task["row_index"],
                "config": task["config"],
                "status": "failed", "error": f"{type(exc).__name__}: {exc}"}


def _marker_intact(seq_dir: Path) -> dict | None:
    """Completed-sequence record if the marker and every listed file
    (checksum-verified) are present, else None."""
    marker = seq_dir / MARKER_NAME
    if not marker.is_file():
        return None
    try:
        data = json.loads(marker.read_text())
        files = data["files"]
        for rel, digest in files.items():
            p = seq_dir / rel
            if not p.is_file() or _sha256(p) != digest:
                return None
    except (KeyError, ValueError, OSError):
        return None
    return {k: data[k] for k in
            ("id", "split", "n_frames", "seed", "row_index", "config", "status")}


def generate_dataset(source_root, out_root, master_seed: int,
                     split_ratio: float = DEFAULT_SPLIT_RATIO,
                     workers: int = 1, resume: bool = False,
                     noise_k: float = 0.0, config_row: int | None = None,
                     overrides: dict | None = None) -> dict:
    """Generate (or finish generating) a degraded dataset.

    Every sequence draws its own optical config, seeded from the master
    seed and the sequence id, optionally pinned to one table row and
    modified by overrides. Work is distributed over ``workers``
    processes; output bytes are identical for any worker count.

    With resume=False the output root must not already hold a run;
    with resume=True the parameters are read back from run.json (the
    arguments must match) and intact sequences are skipped.

    Returns the manifest dict (also written to out_root/manifest.json).
    Raises DatasetError if every sequence fails.
    """
    from .sampler import sample_config  # local import: sampler pulls config

    out = Path(out_root)
    run_path = out / RUN_FILE_NAME
    params = {
        "source_root": str(Path(source_root)),
        "master_seed": int(master_seed),
        "split_ratio": float(split_ratio),
        "noise_k": float(noise_k),
        "config_row": config_row,
        "overrides": overrides or {},
    }
    if run_path.is_file():
        if not resume:
            raise ValidationError(
                f"{out} already holds a run; pass resume=True to continue it")
        stored = json.loads(run_path.read_text())
        stored_params = {k: stored[k] for k in params}
        if stored_params != params:
            raise ValidationError(
                "resume parameters differ from the original run: "
                f"stored {stored_params}, got {params}")
        timestamp = stored["creation_timestamp"]
    else:
        timestamp = _creation_timestamp()
        out.mkdir(parents=True, exist_ok=True)
        _write_json_atomic(run_path, {**params, "creation_timestamp": timestamp})

    sequences = discover_sequences(source_root)
    assignment = split_sequences([sid for sid, _ in sequences],
                                 master_seed, split_ratio)

    tasks = []
    records = {}
    for seq_id, frame_paths in sequences:
        seed = sequence_seed(master_seed, seq_id)
        cfg, row_index = sample_config(seed, row_index=config_row,
                                       overrides=overrides)
        task = {
            "id": seq_id,
            "split": assignment[seq_id],
            "frames": [str(p) for p in frame_paths],
            "seed": seed,
            "row_index": row_index,
            "config": cfg.to_dict(),
            "out_root": str(out),
            "noise_k": float(noise_k),
        }
        if resume:
            done = _marker_intact(out / task["split"] / seq_id)
            if done is not None:
                records[seq_id] = done
                continue
        tasks.append(task)

    if workers > 1 and tasks:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_process_sequence, tasks):
                records[rec["id"]] = rec
    else:
        for task in tasks:
            rec = _process_sequence(task)
            records[rec["id"]] = rec

    ordered = [records[sid] for sid, _ in sequences]
    ok = [r for r in ordered if r["status"] == "ok"]
    failed = [r for r in ordered if r["status"] != "ok"]
    manifest = {
        "creation_timestamp": timestamp,
        "parameters": params,
        "n_sequences": len(ordered),
        "n_train": sum(1 for r in ok if r["split"] == "train"),
        "n_test": sum(1 for r in ok if r["split"] == "test"),
        "n_failed": len(failed),
        "sequences": ordered,
    }
    _write_json_atomic(out / MANIFEST_NAME, manifest)
    if not ok:
        raise DatasetError("every sequence failed; see manifest for errors")
    return manifest


def resume(out_root, workers: int = 1) -> dict:
    """Finish an interrupted run using the parameters stored at its
    creation. Already-complete sequences are checksum-verified and
    skipped; the final manifest matches an uninterrupted run's."""
    run_path = Path(out_root) / RUN_FILE_NAME
    if not run_path.is_file():
        raise ValidationError(f"no {RUN_FILE_NAME} under {out_root}; nothing to resume")
    stored = json.loads(run_path.read_text())
    return generate_dataset(
        stored["source_root"], out_root, stored["master_seed"],
        split_ratio=stored["split_ratio"], workers=workers, resume=True,
        noise_k=stored["noise_k"], config_row=stored["config_row"],
        overrides=stored["overrides"] or None)
