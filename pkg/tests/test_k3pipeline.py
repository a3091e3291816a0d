import json
import random

import pytest

from scrollforge.idealkit import Ideal
from scrollforge.k3pipeline import (
    ORIGIN, GenericityError, IdealCache, RetryBudgetExhausted, RetryCounter, VerificationReport,
    build_cubic_scroll, conic_basis_size, resolve_stages, run_pipeline, sample_secant_data,
    secant_plane, secant_triples,
)
from scrollforge.polycore import Ring
from scrollforge.projlab import certify_smooth, scheme_length


@pytest.fixture(scope="module")
def scroll():
    return build_cubic_scroll()


def test_cubic_scroll(scroll):
    hd = scroll.Z.hilbert_data()
    assert (hd.dim, hd.degree) == (2, 3)
    assert certify_smooth(scroll.Z)
    assert conic_basis_size(scroll) == 5


def test_secant_pairs(scroll):
    rng = random.Random(5)
    ell, pairs = sample_secant_data(scroll, rng, RetryCounter(100))
    assert len(pairs) == 8
    net = [l.compose(scroll.conics, scroll.plane) for l in ell.forms()]
    for t, (x, y) in pairs:
        assert scheme_length(secant_plane(scroll, ell, t).ideal) == 3
        # the three points have proportional images under the projection from ℓ
        imgs = [[f.evaluate(q) for f in net] for q in (t, x, y)]
        for u in imgs[1:]:
            assert all((imgs[0][i] * u[j] - imgs[0][j] * u[i]) % scroll.plane.p == 0
                       for i in range(3) for j in range(3))
        assert t not in (x, y) and x != y
    assert secant_triples(scroll, ell, pairs[0][0]) == pairs[0][1]


def test_base_point_rejected(scroll):
    rng = random.Random(5)
    ell, _ = sample_secant_data(scroll, rng, RetryCounter(100))
    with pytest.raises(GenericityError):
        secant_triples(scroll, ell, ORIGIN)


def test_retry_counter():
    c = RetryCounter(2)
    c.bump()
    c.bump()
    with pytest.raises(RetryBudgetExhausted):
        c.bump("third")


def test_resolve_stages():
    assert resolve_stages(["ruling-quadric"]) == ["scroll", "octic", "embed", "quadrics", "reconstruct",
                                                  "ruling-quadric"]
    assert resolve_stages(["lattice-only"]) == ["lattice"]
    assert resolve_stages(["lattice", "scroll"]) == ["scroll", "lattice"]
    with pytest.raises(ValueError):
        resolve_stages(["nonsense"])


def test_report_serialization():
    rep = VerificationReport(1, 32003)
    assert rep.record("a", 3, 3, millis=5)
    assert not rep.record("b", [1, 2], [1, 3])
    d = json.loads(rep.to_json())
    assert d["checks"][0] == {"name": "a", "expected": 3, "actual": 3, "pass": True, "millis": 5}
    assert "millis" not in json.loads(rep.to_json(timings=False))["checks"][0]
    assert [c.name for c in rep.failed()] == ["b"]
    assert "FAIL  b" in rep.to_text()


def test_ideal_cache(tmp_path):
    R = Ring(3, names=("u", "v", "w"))
    x, y, z = R.gens()
    I = Ideal(R, [x * y - z * z, x + y])
    cache = IdealCache(str(tmp_path), ("t", 1))
    assert cache.load("s", "I", R) is None
    cache.store("s", "I", I)
    assert cache.load("s", "I", R) == I
    with pytest.raises(ValueError):
        cache.load("s", "I", Ring(4))
    assert IdealCache(str(tmp_path), ("t", 2)).load("s", "I") is None
    assert IdealCache(None, ("t", 1)).load("s", "I") is None


def test_lattice_only_run():
    art, rep = run_pipeline(1, 32003, ["lattice"])
    assert rep.all_passed and rep.retries == 0
    assert art.scroll is None
    assert all(c.name.startswith("lattice:") for c in rep.checks)


def test_retry_budget_exhaustion():
    # seed 1 needs several resamples, so a zero budget must fail loudly
    with pytest.raises(RetryBudgetExhausted):
        run_pipeline(1, 32003, ["octic"], retry_budget=0)


def test_scroll_stage_report():
    _, rep = run_pipeline(3, 32003, ["scroll"])
    assert rep.all_passed
    assert {c.name for c in rep.checks} == {"scroll: Z (dim, deg)", "scroll: Z smooth",
                                            "scroll: |2h-E| basis size"}
