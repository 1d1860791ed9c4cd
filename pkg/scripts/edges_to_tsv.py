"""Convert a whitespace edge list ``u v [w [t]]`` into the layered TSV dialect.

The fourth column (a time stamp or relation id) becomes the layer name, which is
the layout of the networkrepository ``.edges`` downloads such as aves-wildbird.
Lines starting with ``%`` or ``#`` are skipped.

    python scripts/edges_to_tsv.py aves-wildbird-network.edges > wildbirds.tsv
"""

import sys


def convert(lines, out):
    for line in lines:
        parts = line.split()
        if not parts or parts[0].startswith(("%", "#")):
            continue
        u, v = parts[0], parts[1]
        w = parts[2] if len(parts) > 2 else "1"
        layer = parts[3] if len(parts) > 3 else "0"
        if u != v:
            out.write(f"{layer}\t{u}\t{v}\t{w}\n")


if __name__ == "__main__":
    with open(sys.argv[1], encoding="utf-8") as fh:
        convert(fh, sys.stdout)
