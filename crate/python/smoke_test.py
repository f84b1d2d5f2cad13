"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation ./crates/py
"""
from fractions import Fraction

import maxpareto_py as mp


def main():
    box = mp.Instance(
        a=[["1", "0"], ["0", "1"], ["-1", "0"], ["0", "-1"]],
        b=["1", "1", "0", "0"],
        u=[["1", "0"], ["0", "1"]],
        c=["1", "1"],
    )
    assert (box.k, box.m, box.n) == (2, 4, 2)
    witness = box.verify(["1/2", "1/2"])
    assert witness is not None and all(Fraction(v) >= Fraction(1, 2) for v in witness)
    assert box.verify(["1", "1"]) is None
    cert = box.certify(["1", "1"])
    assert cert is not None and len(cert["w"]) == 2

    report = box.solve_heuristic(seed=1)
    assert report["po_verified"] and report["status"] == "Optimal"
    exact = box.solve_exact()
    assert exact["status"] == "Optimal"

    again = mp.Instance.from_json(box.to_json())
    assert again.to_json() == box.to_json()

    g = mp.Graph.example()
    m1 = [(1, 1), (2, 2)]
    assert g.payoff(m1) == ["0", "2", "4"]
    assert g.is_po(m1) and g.is_fpo(m1)
    assert not g.is_po([(1, 0), (2, 2)])
    assert sorted(g.all_blocking_sets(m1)) == [[1], [1, 2], [2]]

    w, ratio = mp.prop9(3)
    assert Fraction(ratio) >= 4 and Fraction(w[0]) / Fraction(w[-1]) == Fraction(ratio)

    inst = mp.generate(4, mult=2, seed=7)
    h = inst.solve_heuristic(w_cap="8", starts=4, seed=7)
    e = inst.solve_exact()
    assert Fraction(h["lb"]) <= Fraction(e["lb"])

    try:
        box.verify(["1"])
    except ValueError:
        pass
    else:
        raise AssertionError("dimension mismatch accepted")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
