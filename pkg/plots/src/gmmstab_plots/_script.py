"""Shared argument handling for the one-figure-per-script entry points."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureError, FigureSpec, render


def run(figure_id: str, description: str, argv=None, allow_log_x: bool = False) -> int:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--input", required=True, help="CSV produced by the gmmstab CLI")
    parser.add_argument("--output", required=True, help="image file to write")
    if allow_log_x:
        parser.add_argument("--log-x", action="store_true", help="log-scale epsilon axis")
    args = parser.parse_args(argv)
    try:
        render(
            FigureSpec(args.input, figure_id, args.output),
            log_x=getattr(args, "log_x", False),
        )
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
