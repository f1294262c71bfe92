"""2x2 minimum-separation grid: three dimension panels plus the
sqrt(log K) scaling panel."""

import sys

from ._script import run


def main(argv=None) -> int:
    return run("sepVSK", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
