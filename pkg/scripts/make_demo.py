#!/usr/bin/env python3
"""Generate a small synthetic demo dataset: manifest, tasks, service config.

Usage: python3 scripts/make_demo.py [out_dir]

The corpus is image-free (precomputed features) so it loads instantly; every
search mode has something to find and the task file references real shots.
"""

import json
import sys
from pathlib import Path

import numpy as np

LABELS = [
    "faces", "texts", "cars", "outdoor", "indoor", "water",
    "animals", "buildings", "crowd", "food", "night", "sports",
]

PALETTE_BINS = {  # palette index -> a histogram bin of that color family
    0: 0, 3: 180, 4: 187, 6: 18, 8: 5, 1: 215, 9: 139, 5: 210,
}


def make_keyframe(rng, video_index: int, shot_index: int) -> dict:
    theme = int(rng.choice(list(PALETTE_BINS)))
    main_bin = PALETTE_BINS[theme]
    other_bin = PALETTE_BINS[int(rng.choice(list(PALETTE_BINS)))]
    main_frac = float(rng.uniform(0.55, 0.9))
    hist = [0.0] * 216
    hist[main_bin] += main_frac
    hist[other_bin] += 1.0 - main_frac

    grid = [theme] * 9
    for cell in rng.choice(9, size=int(rng.integers(0, 4)), replace=False):
        grid[int(cell)] = int(rng.integers(0, 12))

    labels = rng.choice(LABELS, size=int(rng.integers(2, 5)), replace=False)
    concepts = {str(label): round(float(rng.uniform(0.4, 1.0)), 3) for label in labels}

    return {
        "id": f"v{video_index:02d}_s{shot_index:02d}",
        "video": f"v{video_index:02d}",
        "shot_index": shot_index,
        "timestamp_s": round(shot_index * 2.0 + 1.0, 2),
        "histogram": hist,
        "spatial_grid": grid,
        "concepts": concepts,
    }


def main(out_dir: str = "demo") -> int:
    rng = np.random.default_rng(7)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    n_videos, shots_per_video = 12, 8
    videos, shots, keyframes = [], [], []
    for v in range(n_videos):
        videos.append(f"v{v:02d}")
        for s in range(shots_per_video):
            kf = make_keyframe(rng, v, s)
            keyframes.append(kf)
            shots.append(
                {
                    "video": kf["video"],
                    "index": s,
                    "start_frame": 50 * s,
                    "end_frame": 50 * s + 49,
                    "keyframe": kf["id"],
                }
            )
    manifest = {"videos": videos, "shots": shots, "keyframes": keyframes}
    (out / "manifest.json").write_text(json.dumps(manifest))

    tasks = [
        {
            "id": "kis-red-door",
            "type": "kis_visual",
            "duration_sec": 300,
            "prompt": "Find the clip at v00 shot 3 (around 7s).",
            "target": {"video": "v00", "start_sec": 6.0, "end_sec": 8.0},
        },
        {
            "id": "kis-text-scene",
            "type": "kis_textual",
            "duration_sec": 420,
            "prompt": "A scene described as v03 around shot 5.",
            "target": {"video": "v03", "start_sec": 10.0, "end_sec": 12.0},
        },
        {
            "id": "avs-faces",
            "type": "avs",
            "duration_sec": 300,
            "prompt": "Find shots whose keyframe shows faces (score >= 0.5).",
            "relevant": [
                {"video": kf["video"], "shot_index": kf["shot_index"]}
                for kf in keyframes
                if kf["concepts"].get("faces", 0.0) >= 0.5
            ],
        },
    ]
    (out / "tasks.json").write_text(json.dumps(tasks, indent=2))

    config = {
        "manifest": "manifest.json",
        "tasks": "tasks.json",
        "host": "127.0.0.1",
        "port": 8765,
        "catalog_cache_dir": "cache",
        "usage_log": "usage.jsonl",
        "score_log": "scores.jsonl",
        "min_members": 15,
        "concept_threshold": 0.5,
        "som_params": {"width": 6, "height": 6, "epochs": 10, "seed": 7},
    }
    frontend = Path(__file__).resolve().parent.parent / "frontend"
    if (frontend / "index.html").exists():
        config["static_dir"] = str(frontend)
    (out / "config.json").write_text(json.dumps(config, indent=2))

    member_counts = {}
    for kf in keyframes:
        for label, score in kf["concepts"].items():
            if score >= 0.5:
                member_counts[label] = member_counts.get(label, 0) + 1
    gated = sorted(l for l, c in member_counts.items() if c >= config["min_members"])
    print(f"wrote {out}/: {len(videos)} videos, {len(keyframes)} keyframes")
    print(f"concept maps at min_members={config['min_members']}: {', '.join(gated)}")
    print(f"run: divex serve --config {out}/config.json")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
