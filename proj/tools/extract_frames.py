#!/usr/bin/env python3
"""Sample frames from a video with ffmpeg and write a slowfast manifest.

    tools/extract_frames.py input.mp4 out_dir --fps 2
    slowfast tokenize --manifest out_dir/manifest.json
"""

import argparse
import json
import shutil
import subprocess
import sys
from pathlib import Path


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("video")
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--fps", type=float, default=2.0, help="sampling rate (default 2)")
    ap.add_argument("--ffmpeg", default=shutil.which("ffmpeg") or "ffmpeg")
    args = ap.parse_args(argv)
    if args.fps <= 0:
        ap.error("--fps must be > 0")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    cmd = [args.ffmpeg, "-loglevel", "error", "-y", "-i", args.video,
           "-vf", f"fps={args.fps}", str(args.out_dir / "frame_%06d.png")]
    try:
        subprocess.run(cmd, check=True)
    except (OSError, subprocess.CalledProcessError) as e:
        print(f"error: ffmpeg failed: {e}", file=sys.stderr)
        return 2

    frames = sorted(args.out_dir.glob("frame_*.png"))
    if not frames:
        print("error: no frames extracted", file=sys.stderr)
        return 2
    manifest = {"version": "1", "fps": args.fps, "frames": [{"path": f.name} for f in frames]}
    (args.out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"{len(frames)} frames -> {args.out_dir / 'manifest.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
