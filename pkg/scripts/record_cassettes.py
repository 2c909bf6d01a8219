import argparse
import os
from pathlib import Path

from trajforge.backends import CassetteTransport, MyGeneClient, OncoTreeClient

"""
IMPORTANT: this script talks to the live OncoTree and MyGene.info services. Run it from
the repository root; the cassettes replace those under tests/data/cassettes, which the
tests replay without network access.
"""

ONCOTREE_QUERIES = [("glioblastoma", "tumor"), ("prostate cancer", "tissue")]
MYGENE_QUERIES = [("ERBB2", 3), ("spatial transcriptomic signature", 3)]


def record(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    onco_file = out_dir.joinpath("oncotree.jsonl")
    gene_file = out_dir.joinpath("mygene.jsonl")
    for f in (onco_file, gene_file):
        if f.exists():
            os.remove(f)

    onco = OncoTreeClient(transport=CassetteTransport(onco_file, mode="record"))
    for query, query_type in ONCOTREE_QUERIES:
        print(f"OncoTree {query_type} {query!r}")
        print(onco.lookup(query, query_type))
    onco.close()

    gene = MyGeneClient(transport=CassetteTransport(gene_file, mode="record"))
    for query, top_k in MYGENE_QUERIES:
        print(f"MyGene {query!r}")
        print(gene.query(query, top_k))
    gene.close()


def main():
    parser = argparse.ArgumentParser(description="record trajforge tool cassettes")
    parser.add_argument("--out_dir", default="tests/data/cassettes", type=str)
    args = parser.parse_args()
    record(Path(args.out_dir))


if __name__ == "__main__":
    main()
