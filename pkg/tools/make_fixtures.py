"""Regenerate the packaged graph fixtures under src/aptrisk/fixtures/.

Run from the repository root:  python tools/make_fixtures.py

Fixtures:
  g2            path on 2 nodes
  g3_1 / g3_2   the two connected 3-node graphs (triangle, path)
  g4_1 .. g4_6  the six connected 4-node graphs, ordered by edge count
  org49         synthetic 49-node organization LAN: a 4-node core ring with
                one cross link, 9 department hubs each homed to two core
                nodes, 4 hosts per hub, one lateral host-host link per
                department, and 3 hub-hub shortcuts. Deterministic, connected,
                minimum degree 1. Stands in for a real small-organization
                network; experiment checks on it assert trends, not values.
"""

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "aptrisk" / "fixtures"

SMALL = {
    # node ids are 1-based in the file format
    "g2": [(1, 2)],
    "g3_1": [(1, 2), (1, 3), (2, 3)],              # triangle
    "g3_2": [(1, 2), (2, 3)],                      # path
    "g4_1": [(1, 2), (2, 3), (3, 4)],              # path
    "g4_2": [(1, 2), (1, 3), (1, 4)],              # star
    "g4_3": [(1, 2), (2, 3), (3, 4), (1, 4)],      # cycle
    "g4_4": [(1, 2), (1, 3), (2, 3), (3, 4)],      # triangle + pendant
    "g4_5": [(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)],          # complete minus one edge
    "g4_6": [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],  # complete
}


def org49():
    edges = []
    core = [1, 2, 3, 4]
    edges += [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]
    hubs = list(range(5, 14))  # 9 department hubs
    for d, hub in enumerate(hubs):
        edges.append((core[d % 4], hub))
        edges.append((core[(d + 1) % 4], hub))
    host = 14
    for d, hub in enumerate(hubs):
        members = []
        for _ in range(4):
            edges.append((hub, host))
            members.append(host)
            host += 1
        edges.append((members[0], members[1]))  # one lateral link per department
    # a few hub-hub shortcuts (shared services between departments)
    edges += [(5, 9), (7, 11), (6, 13)]
    assert host - 1 == 49
    return edges


def write(name, edges, n, header_note):
    lines = [f"# {header_note}", f"# nodes={n}"]
    seen = set()
    for a, b in edges:
        key = (min(a, b), max(a, b))
        assert key not in seen and a != b
        seen.add(key)
        lines.append(f"{key[0]} {key[1]}")
    (OUT / f"{name}.edges").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"{name}: {n} nodes, {len(seen)} edges")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    notes = {
        "g2": "path on 2 nodes",
        "g3_1": "triangle",
        "g3_2": "path on 3 nodes",
        "g4_1": "path on 4 nodes",
        "g4_2": "star on 4 nodes",
        "g4_3": "cycle on 4 nodes",
        "g4_4": "triangle with a pendant node",
        "g4_5": "4 nodes, complete minus one edge",
        "g4_6": "complete graph on 4 nodes",
    }
    for name, edges in SMALL.items():
        n = max(max(e) for e in edges)
        write(name, edges, n, notes[name])
    write(
        "org49",
        org49(),
        49,
        "synthetic 49-node organization LAN (core ring, 9 dept hubs, 36 hosts); "
        "generated by tools/make_fixtures.py",
    )


if __name__ == "__main__":
    main()
