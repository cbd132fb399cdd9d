#!/usr/bin/env python3
"""Smoke test for the hessgraph_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/
(release preferred), exposes it as an importable module in a temp
directory, and exercises the main entry points.

Run from the repository root:

    cargo build -p hessgraph-py --release
    python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_library() -> pathlib.Path:
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libhessgraph_py.so", "hessgraph_py.so", "libhessgraph_py.dylib")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("build the extension first: cargo build -p hessgraph-py [--release]")


def import_module():
    lib = locate_library()
    staging = pathlib.Path(tempfile.mkdtemp(prefix="hessgraph-py-"))
    shutil.copy2(lib, staging / "hessgraph_py.so")
    sys.path.insert(0, str(staging))
    import hessgraph_py

    return hessgraph_py


def main() -> None:
    hg = import_module()

    # field helpers
    assert hg.legendre(5, 2) == -1
    assert hg.legendre(7, 4) == 1
    assert hg.sqrt_mod(7, 4) == 2
    assert hg.sqrt_mod(5, 2) is None
    assert hg.cube_roots_mod(7, 1) == [1, 2, 4]
    assert hg.cube_roots_mod(5, 1) == [1]
    assert hg.primitive_cube_root(7) == 2
    assert hg.primitive_cube_root(5) is None

    # the Hessian map fixes 1728 and folds 0 into infinity
    p = 7919  # above the structural constants, so nothing reduces
    assert hg.hess_j(p, 1728) == 1728
    assert hg.hess_j(p, 6912) == 0
    assert hg.hess_j(p, 0) is None
    assert hg.hess_j(p, None) is None

    # x-level endomorphism: the two-torsion x = 12 is fixed
    assert hg.psi_proj(p, -6912, 12) == 12
    assert hg.lambda_hess(139, 3) == 139 - 5

    # graphs
    edges = hg.hessian_graph_edges(17)
    assert len(edges) == 18
    assert ("inf", "inf") in edges
    dot = hg.graph_dot(17)
    assert dot.startswith("digraph g17 {") and dot.count(" -> ") == 18
    dot29 = hg.graph_dot(29, map="psi-s", highlight="rational")
    assert dot29.count("fillcolor=gray") == 16

    row = hg.stats_row(29)
    assert row.startswith("29,hess,30,")
    assert len(hg.stats_header().split(",")) == len(row.split(","))

    # verifiers
    for prime, theorem in [(29, "q2-structure"), (31, "q1-structure"), (13, "curve-structure")]:
        report = json.loads(hg.verify(prime, theorem))
        assert report["schema"] == 1
        assert report["passed"] is True, (prime, theorem, report)

    # curve-level API
    c = hg.Curve(5, 0, -1728)
    assert c.count_points() == 6 and c.trace() == 0 and c.is_supersingular()
    c2 = hg.Curve(5, 1, 0)
    assert c2.count_points() == 4 and c2.trace() == 2
    h = c2.hessian()
    assert h is not None and h.j_invariant() == hg.hess_j(5, c2.j_invariant())
    assert hg.Curve.from_j(13, 5).j_invariant() == 5
    assert c.hessian() is None  # j = 0 degenerates to three lines
    tw = c2.twist(2)
    assert tw.j_invariant() == c2.j_invariant() and not tw.is_isomorphic_to(c2)

    # model curve
    m = hg.ModelCurve(29)
    assert m.k() == (-6912) % 29
    assert m.s_size() == 2 * 29
    assert m.ext_order() == 30 * 30
    assert m.psi_x(None) is None
    assert m.psi_x(12 % 29) == 12 % 29
    assert m.is_periodic_x(None) and m.depth_x(None) == 0
    assert m.depth_x(0) == 1  # x = 0 lifts to the 3-torsion kernel
    ya, yb = m.iota_y(0)
    assert ya == 0 and yb != 0  # y = sqrt(k)/2 is irrational for p = 2 mod 3

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
