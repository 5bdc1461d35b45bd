"""Smoke test for the boxtherm_py extension.

Build and install first, e.g. `maturin develop --release` (inside a
virtualenv) or `pip install crates/python`, then run this script.
"""
import math

import boxtherm_py as bt


def main():
    mesh = bt.Mesh.structured(8)
    assert mesh.num_vertices == 81 and mesh.num_triangles == 128
    assert mesh.validate()["valid"]
    assert bt.Mesh.from_text(mesh.to_text()).vertices() == mesh.vertices()

    dual = bt.DualMesh(mesh)
    assert abs(sum(dual.box_areas()) - 1.0) < 1e-12
    assert abs(dual.total_area() - 1.0) < 1e-12

    coeffs = bt.CoefficientModel("sigmoid:0.5,2.0", "const:1.0", 1.0)
    assert coeffs.constants()["c_k"] == 2.0
    try:
        bt.CoefficientModel("const:-1", "const:1", 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative conductivity accepted")

    solver = bt.Solver(mesh, coeffs, tau=0.01, t_final=0.05)
    traj = solver.solve(lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y))
    assert len(traj) == 6
    assert all(step["picard_iterations"] <= 10 for step in traj.steps())

    n = bt.norms(mesh, dual, traj.final_field())
    assert n["l2"] > 0.0 and n["h1_semi"] > n["l2"]

    rows, cols, vals = bt.fem_stiffness(mesh)
    assert len(rows) == len(cols) == len(vals)

    ok, table = bt.verify([1, 2, 3], samples=20)
    assert ok, table

    rates, passed, csv = bt.converge([2, 3, 4])
    assert passed, csv
    print("boxtherm_py smoke test passed; rates", ", ".join(f"{r:.3f}" for r in rates))


if __name__ == "__main__":
    main()
