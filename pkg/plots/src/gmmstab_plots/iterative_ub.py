"""3-row refined-bounds panels (c*, eta*-1, proportion bound / pi_min),
one column per K, curves per separation c."""

import sys

from ._script import run


def main(argv=None) -> int:
    return run("iterativeUB", __doc__, argv, allow_log_x=True)


if __name__ == "__main__":
    sys.exit(main())
