"""Contamination sweep: estimated fit level and certified mean bound per
lambda; vacuous or inapplicable points leave gaps."""

import sys

from ._script import run


def main(argv=None) -> int:
    return run("contamination", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
