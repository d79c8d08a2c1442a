"""Convert the LINQS Cora release (cora.cites, cora.content) into sac2vec inputs.

Writes <out>/cora.edges, <out>/cora.content (node term value triplets) and
<out>/cora.labels with dense node ids in cora.content order.

    python3 scripts/prepare_cora.py path/to/cora --out data/cora
"""

import argparse
import logging
from pathlib import Path

log = logging.getLogger("prepare_cora")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("raw_dir", type=Path)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)

    ids = {}
    with open(args.raw_dir / "cora.content") as src, \
            open(args.out / "cora.content", "w") as content, open(args.out / "cora.labels", "w") as labels:
        for line in src:
            parts = line.split()
            if not parts:
                continue
            node = ids.setdefault(parts[0], len(ids))
            for term, value in enumerate(parts[1:-1]):
                if value != "0":
                    content.write(f"{node} {term} {value}\n")
            labels.write(f"{node} {parts[-1]}\n")

    pairs, raw, dropped = set(), 0, 0
    with open(args.raw_dir / "cora.cites") as src:
        for line in src:
            parts = line.split()
            if len(parts) != 2:
                continue
            raw += 1
            if parts[0] not in ids or parts[1] not in ids or parts[0] == parts[1]:
                dropped += 1
                continue
            a, b = ids[parts[0]], ids[parts[1]]
            pairs.add((min(a, b), max(a, b)))
    with open(args.out / "cora.edges", "w") as fh:
        fh.writelines(f"{a} {b}\n" for a, b in sorted(pairs))
    # the raw file lists some links in both directions; the undirected edge count is lower than the line count
    log.info("nodes %d, citation lines %d, dropped %d, undirected edges %d", len(ids), raw, dropped, len(pairs))


if __name__ == "__main__":
    main()
