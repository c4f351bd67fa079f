"""CLI: render every discoverable figure family from a sweep directory."""
from __future__ import annotations

import argparse
import sys

from .figures import MalformedInputError, default_jobs, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render corridorsim sweep CSVs into PNG figures"
    )
    parser.add_argument("--in-dir", required=True, help="sweep output directory")
    parser.add_argument("--out-dir", required=True, help="directory for PNG files")
    args = parser.parse_args(argv)

    try:
        jobs = default_jobs(args.in_dir, args.out_dir)
    except OSError as exc:
        print(f"error: cannot read {args.in_dir}: {exc}", file=sys.stderr)
        return 1
    if not jobs:
        print(f"error: no renderable sweep files found in {args.in_dir}", file=sys.stderr)
        return 1
    for job in jobs:
        try:
            path = render(job)
        except MalformedInputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
