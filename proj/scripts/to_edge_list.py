#!/usr/bin/env python3
"""Convert downloaded network files to 'source target' edge lists."""

import argparse
import sys

import pandas as pd


def celegans(path):
    # NeuronConnect columns: Neuron 1, Neuron 2, Type, Nbr. Send types
    # (S, Sp) give i->j, receive types (R, Rp) give j->i, gap junctions
    # (EJ) give both directions. NMJ rows are not neuron-neuron links.
    try:
        table = pd.read_excel(path)
    except ValueError:
        table = pd.read_csv(path)
    table.columns = [c.strip().lower() for c in table.columns]
    edges = set()
    for a, b, kind in zip(table["neuron 1"], table["neuron 2"], table["type"]):
        kind = str(kind).strip()
        if kind in ("S", "Sp"):
            edges.add((a, b))
        elif kind in ("R", "Rp"):
            edges.add((b, a))
        elif kind == "EJ":
            edges.update({(a, b), (b, a)})
    return sorted(edges)


def generic(path):
    text = open(path, encoding="utf-8", errors="replace").read()
    if text.lstrip().startswith(("graph", "Creator")) or "\ngraph" in text[:2000]:
        import networkx as nx

        g = nx.read_gml(path, label="label")
        return sorted((str(u), str(v)) for u, v in g.edges())
    rows = []
    for line in text.splitlines():
        parts = line.replace(",", " ").split()
        if len(parts) >= 2 and not line.startswith("#"):
            rows.append((parts[0], parts[1]))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("kind", choices=["celegans", "generic"])
    parser.add_argument("source")
    parser.add_argument("target")
    args = parser.parse_args()
    edges = celegans(args.source) if args.kind == "celegans" else generic(args.source)
    with open(args.target, "w", encoding="utf-8") as out:
        for a, b in edges:
            out.write(f"{a} {b}\n")
    print(f"{args.target}: {len(edges)} edges", file=sys.stderr)


if __name__ == "__main__":
    main()
