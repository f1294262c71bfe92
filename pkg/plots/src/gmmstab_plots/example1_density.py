"""Overlaid density curves of a built-in example pair."""

import sys

from ._script import run


def main(argv=None) -> int:
    return run("example1-density", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
