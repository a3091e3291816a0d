import random

import pytest
import sympy
from hypothesis import settings

from scrollforge.k3pipeline import run_pipeline
from scrollforge.polycore import Ring

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

PIPELINE_SEEDS = (1, 2, 3)


def to_sympy(f, syms):
    expr = sympy.Integer(0)
    for e, c in f.terms.items():
        term = sympy.Integer(c)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return expr


def from_sympy(expr, ring: Ring, syms):
    poly = sympy.Poly(expr, *syms)
    return ring.from_terms({tuple(m): int(c) for m, c in poly.terms()})


def random_homogeneous_ideal_gens(rng: random.Random, ring: Ring, count: int, max_deg: int, density=0.5):
    gens = []
    while len(gens) < count:
        f = ring.random_poly(rng, rng.randint(1, max_deg), density=density)
        if not f.is_zero():
            gens.append(f)
    return gens


_runs = {}


def pipeline_run(seed: int, upto: str):
    """Shared pipeline runs keyed by (seed, last stage) so suites reuse the work."""
    key = (seed, upto)
    if key not in _runs:
        _runs[key] = run_pipeline(seed, 32003, [upto, "lattice"])
    return _runs[key]


@pytest.fixture(scope="session")
def quadric_runs():
    return {s: pipeline_run(s, "quadrics") for s in PIPELINE_SEEDS}


CRITERIA = {}


def record_criterion(number: int, title: str, passed: bool, detail: str = ""):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title}" + (f" ({detail})" if detail else "")
    CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
