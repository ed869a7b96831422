"""Smoke test for the diskdyn Python extension."""

import json
import math

import diskdyn_py as dd


def main():
    f = dd.DiskMap.preset("example61", alpha=0.5)
    kind, omega, a = f.classify()
    assert kind == "hyperbolic", kind
    assert abs(omega - 1) < 1e-6 and abs(a - 2 / 3) < 1e-6

    verdict, seq = dd.DiskMap.preset("translation").hyperbolic_step(n_max=50)
    assert verdict == "positive"
    assert all(abs(s - 1 / math.sqrt(5)) < 1e-12 for s in seq)

    g = dd.DiskMap.preset("example62")
    assert g.classify()[0] == "parabolic"
    assert g.hyperbolic_step(n_max=10_000)[0] == "zero"

    nodes = f.grand_orbit(forward_n=12, depth=3)
    assert all(abs(p) < 1 for p, *_ in nodes)
    assert abs(f.nevanlinna(0.25) - 1.2) < 1e-9

    b = dd.DiskMap.blaschke(1, [(0.3 + 0.2j, 1), (-0.4, 2)])
    assert b.degree() == 3
    for z, k in b.preimages(0.1j):
        assert abs(b(z) - 0.1j) < 1e-10
    h = f.compose(g)
    assert abs(h(0.2) - f(g(0.2))) < 1e-14

    code, summary = dd.run(json.dumps({"operation": "classify", "map": {"preset": {"name": "power2"}}}))
    assert code == 0 and json.loads(summary)["result"]["kind"] == "elliptic-interior"
    try:
        dd.DiskMap.preset("example61", alpha=2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha outside (0, 1) accepted")

    results = dd.paper_suite()
    for cid, name, passed, detail in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {cid} {name}: {detail}")
    assert len(results) == 12 and all(r[2] for r in results)
    print("smoke test passed")


if __name__ == "__main__":
    main()
