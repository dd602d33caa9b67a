"""Smoke test for the wenods_py extension.

Build and run from the repository root:

    cargo build --release -p wenods-python
    cp target/release/libwenods_py.so python/wenods_py.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import wenods_py as w


def main():
    assert "config3" in w.builtin_names()

    spec = w.RiemannSpec.builtin("config3")
    assert spec.config == 3 and spec.gamma == 1.4
    assert max(r for _, r in spec.verify_relations()) < 1e-3
    again = w.RiemannSpec.from_json(spec.to_json())
    assert again.states == spec.states

    sampled = w.RiemannSpec.sample(16, 7)
    assert sampled.states == w.RiemannSpec.sample(16, 7).states
    assert max(r for _, r in sampled.verify_relations()) < 1e-12

    spec.t_final = 0.1
    z = w.Solver("z")
    field, steps = z.solve(spec, 32, 32)
    assert (field.nx, field.ny) == (32, 32) and steps > 0
    prim = field.primitive()
    assert all(len(prim[k]) == 32 * 32 for k in ("rho", "u", "v", "p"))
    assert min(prim["rho"]) > 0 and min(prim["p"]) > 0

    reference = w.make_reference(spec, 64)
    errors = field.l1_errors(reference)
    assert all(math.isfinite(v) and v > 0 for v in errors.values())

    # A zero network gives uniform multipliers, which reproduce WENO-Z when eps = 0.
    z0 = w.Solver("z", eps=0.0)
    ds = w.Solver("ds-z", eps=0.0, model=w.CnnModel.zeros("B"))
    assert ds.solve(spec, 32, 32)[0].conserved() == z0.solve(spec, 32, 32)[0].conserved()

    rows = w.compare(spec, [(16, 16), (32, 32)], z0, ds, reference)
    assert [r["ratio"]["rho"] for r in rows] == [1.0, 1.0]

    try:
        w.Solver("ds-z")
    except ValueError:
        pass
    else:
        raise AssertionError("ds-z without a model must fail")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "state.f64grid")
        field.save(path)
        assert w.Field.load(path).conserved() == field.conserved()
        names = sorted(os.path.basename(p) for p in field.write_primitive(tmp))
        assert names == ["p.f64grid", "rho.f64grid", "u.f64grid", "v.f64grid"]
        model_path = os.path.join(tmp, "model.json")
        w.CnnModel.zeros("A").save(model_path)
        assert json.load(open(model_path))["arch_tag"] == "A"

    print("wenods_py smoke test passed:", json.dumps(rows[-1]["baseline"]))


if __name__ == "__main__":
    main()
