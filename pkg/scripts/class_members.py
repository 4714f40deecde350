#!/usr/bin/env python3

from permclt.combinatorics import CycleType, class_size
from permclt.errors import ValidationError
from permclt.oracle import class_members, descent_number, major_index
import textwrap
import argparse
import sys

# Listing more than this many permutations needs --force
MAX_LISTED = 100000

def __main__():
    parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=textwrap.dedent("""\
                    List every permutation of a conjugacy class with its
                    descent number and major index.
                    Format: <one-line notation>:<cycles>:<d>:<maj>
                    """)
            )
    parser.add_argument("cycle_type", help='Cycle type, e.g. "1^2 3^1"')
    parser.add_argument("--force", action="store_true", help=f"List classes above {MAX_LISTED} members")
    args = parser.parse_args()

    try:
        lam = CycleType.parse(args.cycle_type)
    except ValidationError as e:
        print(f"Invalid cycle type: {e}", file=sys.stderr)
        return 1
    if lam.n < 1:
        print("The class must act on at least one point", file=sys.stderr)
        return 1

    size = class_size(lam)
    if size > MAX_LISTED and not args.force:
        print(f"Class {lam} has {size} members, use --force to list them", file=sys.stderr)
        return 1

    for p in class_members(lam):
        cycles = ''.join('(' + ' '.join(str(i) for i in cycle) + ')' for cycle in p.cycles())
        print(f"{p}:{cycles}:{descent_number(p)}:{major_index(p)}")
    return 0

if __name__ == "__main__":
    sys.exit(__main__())
