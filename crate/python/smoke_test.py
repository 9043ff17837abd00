"""Smoke test for the cocycle_lab extension module.

Build and install first, e.g.
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/cocycle_lab-*.whl
"""

import cmath
import json
import math
from pathlib import Path

import cocycle_lab as cl

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def close(a, b, tol):
    return abs(a - b) <= tol


def check_algebra():
    a = [[1.0, 2.0], [0.0, 3.0]]
    e = cl.mat_exp(a)
    assert close(e[0][0], math.e, 1e-12) and close(e[1][1], math.exp(3), 1e-11)
    inv = cl.mat_inv(a)
    assert close(inv[0][1], -2.0 / 3.0, 1e-14)
    eig = sorted(cl.eigenvalues(a), key=lambda x: x.real)
    assert close(eig[0], 1.0, 1e-12) and close(eig[1], 3.0, 1e-12)
    assert close(cl.log_norm([[1.0, 0.0], [0.0, 2.0]]), 2.0, 1e-14)
    assert len(cl.ad_matrix(a)) == 4
    try:
        cl.mat_inv([[1.0, 2.0], [2.0, 4.0]])
    except cl.CocycleError:
        pass
    else:
        raise AssertionError("singular matrix was inverted")


def check_scalar_rational():
    model = cl.SemigroupModel([0, -1])
    assert model.z0 == 0 and model.rate == 1
    b = cl.Generator([[[1.0]]], [1.0, -1.0])
    for t, z in [(0.5, 0.3), (2.0, 0.3 + 0.4j), (3.0, -0.8)]:
        g = cl.evolve(model, b, t, z)[0][0]
        want = (math.exp(t) - z) / (1 - z)
        assert close(g, want, 1e-8 * abs(want)), (t, z, g, want)
    k_mu, violation = cl.growth(model, b, 0.5)
    assert close(k_mu, 2.0, 1e-6) and violation == 0.0
    out = json.loads(cl.linearize(model, b))
    assert out["status"] == "linearizable"


def check_jordan():
    model, b = cl.load_scenario((SCENARIOS / "jordan.json").read_text())
    assert b.dim == 2
    t, z = 1.0, 0.5
    g = cl.evolve(model, b, t, z)
    assert close(g[0][1], z * t * math.e, 1e-8)
    assert json.loads(cl.linearize(model, b))["status"] == "obstructed(1)"
    report = json.loads(cl.check_axioms(model, b))
    assert report["pass"] and report["chain_rule_residual"] <= 1e-7
    extracted = cl.extract_generator(model, b, 0.5)
    assert close(extracted[0][1], 0.5, 1e-6)
    cond = json.loads(cl.condition_check([[1.0, 0.0], [0.0, 2.0]], 1.0))
    assert cond["violated_k"] == [1]


def check_demos():
    names = cl.demo_names()
    assert len(names) >= 7
    report = json.loads(cl.run_demo("linear-scalar-rational", growth_radius=0.5))
    assert report["pass"] and close(report["growth"]["k_mu"], 2.0, 1e-6)
    sqrt = cl.Generator.named("sqrt-nonexp")
    assert close(sqrt.eval(0.0)[0][0], 1.0, 1e-12)
    try:
        cl.run_demo("no-such-demo")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown demo accepted")


def check_flow():
    model = cl.SemigroupModel([0, -1, 1])
    z = 0.2 + 0.1j
    t = 1.3
    e = cmath.exp(-t)
    assert close(model.flow(t, z), e * z / (1 - z + e * z), 1e-10)
    w = model.koenigs(z)
    assert close(model.koenigs_inv(w), z, 1e-10)


if __name__ == "__main__":
    for check in (check_algebra, check_scalar_rational, check_jordan, check_demos, check_flow):
        check()
        print(f"{check.__name__}: ok")
