#!/usr/bin/env python3

from permclt.exactpoly import TQPoly
from permclt.errors import ValidationError
import textwrap
import argparse
import json
import sys

def __main__():
    parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=textwrap.dedent("""\
                    Read a generating function saved as JSON (the output of
                    `permclt exact --json`, or a bare {"terms": ...} document)
                    and print its nonzero coefficients.
                    Format: <d>:<maj>:<count>
                    """)
            )
    parser.add_argument("file", help="JSON file, - for stdin")
    parser.add_argument("--marginal", choices=["d", "maj"], help="Only print one marginal")
    args = parser.parse_args()

    try:
        if args.file == "-":
            document = json.load(sys.stdin)
        else:
            with open(args.file, "r") as fd:
                document = json.load(fd)
    except Exception as e:
        print(f"Failed to read {args.file}: {e}", file=sys.stderr)
        return 1

    try:
        gf = TQPoly.from_dict(document.get("gf", document))
    except ValidationError as e:
        print(f"Not a generating function: {e}", file=sys.stderr)
        return 1

    if args.marginal is None:
        for d, maj, count in gf.items():
            print(f"{d}:{maj}:{count}")
        return 0

    marginal = {}
    for d, maj, count in gf.items():
        key = d if args.marginal == "d" else maj
        marginal[key] = marginal.get(key, 0) + count
    for key in sorted(marginal):
        print(f"{key}:{marginal[key]}")
    return 0

if __name__ == "__main__":
    sys.exit(__main__())
