"""Two degenerate members of the construction, each with reducible curves.

``fixture_degenerate_rulings`` uses ``C = B + ℓ1 + ℓ2`` with ``B`` a genus-2
curve and ``ℓ_i`` rulings of ``Z``; ``fixture_two_rational`` uses
``C = Γ1 + Γ2`` with ``Γ_i`` rational curves in ``|3h - 2E|`` and rebuilds
the 8-nodal scroll from it.
"""

from __future__ import annotations

import random

from .idealkit import Ideal, colon_truncated, graded_piece, intersect, saturate, saturate_irrelevant
from .linsys import BaseCondition, RationalMapModel, forms_with_base_conditions, image_scheme
from .polycore import Ring
from .projlab import (
    LinearSubspace, NodeCertificationError, ProjScheme, certify_plane_nodes, classify_against,
    intersection_length, orbit_subscheme, point_data, point_ideal, project_from, scheme_length,
    singular_along, singular_candidates, singular_locus,
)
from .k3pipeline import (
    ORIGIN, GenericityError, PipelineArtifacts, RetryCounter, VerificationReport, _hd_triple, _net,
    _Timer, build_cubic_scroll, reconstruct_scroll, smooth_away_from_origin,
)


def _binary(P2: Ring, rng, d):
    """Random form of degree ``d`` in ``u0, u1`` only."""
    return P2.from_terms({(i, d - i, 0): rng.randrange(P2.p) for i in range(d + 1)})


def _random_line(scroll, rng, counter):
    P4 = scroll.ambient
    while True:
        forms = [P4.linear_form([rng.randrange(P4.p) for _ in range(5)]) for _ in range(3)]
        ell = LinearSubspace.from_forms(P4, forms, "ℓ")
        if ell.codim == 3 and ProjScheme.from_ideal(ell.ideal + scroll.Z.ideal).is_empty():
            return ell
        counter.bump("line meets Z")


def _nodal_count(F, S: ProjScheme) -> int:
    try:
        return sum(c.length for c in certify_plane_nodes(F, S.ideal))
    except NodeCertificationError:
        return -1


def _smooth_plane_cubic(J) -> bool:
    return saturate_irrelevant(Ideal(J.ring, [J] + [J.diff(i) for i in range(3)])).is_unit()


def _nine_point_maps(P2w: Ring, o_ideal: Ideal):
    cond = [BaseCondition(o_ideal, 1, 9)]
    cub = forms_with_base_conditions(P2w, 3, cond)
    qua = forms_with_base_conditions(P2w, 4, cond)
    return cub, qua


# -- C = B + two rulings -----------------------------------------------------------------------


def fixture_degenerate_rulings(prime: int = 32003, retry_budget: int = 20, seed: int = 0):
    """Genus-2 curve ``B ∈ |4h - 2E|`` plus two rulings, projected and mapped to ``P^5``."""
    counter = RetryCounter(retry_budget)
    attempt = 0
    while True:
        rng = random.Random(f"fixture-degenerate:{seed}:{prime}:{attempt}")
        try:
            return _degenerate(prime, rng, counter)
        except GenericityError as exc:
            attempt += 1
            counter.bump(str(exc))


def _degenerate(prime, rng, counter):
    report = VerificationReport(0, prime)
    t = _Timer()
    scroll = build_cubic_scroll(prime)
    P2 = scroll.plane
    u2 = P2.var(2)
    b = u2 * u2 * _binary(P2, rng, 2) + u2 * _binary(P2, rng, 3) + _binary(P2, rng, 4)
    if not (_ordinary_double_at_origin(b) and smooth_away_from_origin(b)):
        raise GenericityError("B is singular")
    Bz = image_scheme(scroll.embedding, ProjScheme(Ideal(P2, [b])), max_degree=4, name="B")
    ell = _random_line(scroll, rng, counter)
    Bp = project_from(Bz, ell, max_degree=6)
    Fb = Bp.ideal.gens[0]
    SB = singular_locus(Bp, 1)
    rul = [P2.linear_form([rng.randrange(1, prime), rng.randrange(1, prime), 0]) for _ in range(2)]
    Fz = [image_scheme(scroll.embedding, ProjScheme(Ideal(P2, [r])), max_degree=2, name=f"ℓ{i + 1}")
          for i, r in enumerate(rul)]
    Fp = [project_from(F, ell, max_degree=2) for F in Fz]
    o9 = ProjScheme.from_ideal(Fp[0].ideal + Fp[1].ideal, "o9")
    if scheme_length(SB.ideal) != 8 or _nodal_count(Fb, SB) != 8:
        raise GenericityError("B' is not 8-nodal")
    P2w = Bp.ring
    o9_on_B = not ProjScheme.from_ideal(o9.ideal + Bp.ideal).is_empty()
    if o9_on_B:
        raise GenericityError("o9 lies on B'")
    report.record("degenerate: p_a(B)", 2, Bz.hilbert_data().pa, millis=t.ms())
    report.record("degenerate: B on Z (dim, deg)", [1, 6], _hd_triple(Bz)[:2], millis=t.ms())
    report.record("degenerate: B' degree", 6, Fb.degree(), millis=t.ms())
    report.record("degenerate: certified nodes of B'", 8, _nodal_count(Fb, SB), millis=t.ms())
    report.record("degenerate: F'_i are lines", [1, 1], [F.ideal.gens[0].degree() if len(F.ideal.gens) == 1
                                                         else -1 for F in Fp], millis=t.ms())
    report.record("degenerate: F'_1 ∩ F'_2 length", 1, scheme_length(o9.ideal), millis=t.ms())
    pencil = forms_with_base_conditions(P2w, 3, [BaseCondition(SB.ideal, 1, 8)])
    report.record("degenerate: cubics through o_1..o_8", 2, pencil.dim, millis=t.ms())
    base = saturate_irrelevant(Ideal(P2w, pencil.forms))
    ninth = saturate_irrelevant(colon_truncated(base, SB.ideal, 3))
    report.record("degenerate: ninth base point", 1, scheme_length(ninth), millis=t.ms())
    report.record("degenerate: ninth base point off B'", True,
                  ProjScheme.from_ideal(ninth + Bp.ideal).is_empty(), millis=t.ms())
    member = pencil.forms[0] + pencil.forms[1].scale(rng.randrange(prime))
    report.record("degenerate: general cubic of the pencil smooth", True, _smooth_plane_cubic(member),
                  millis=t.ms())
    o_ideal = intersect(SB.ideal, o9.ideal)
    cub, qua = _nine_point_maps(P2w, o_ideal)
    report.record("degenerate: cubics through o_1..o_9", 1, cub.dim, millis=t.ms())
    if cub.dim != 1 or qua.dim != 6:
        raise GenericityError("nine points impose dependent conditions")
    report.record("degenerate: that cubic smooth", True, _smooth_plane_cubic(cub.forms[0]), millis=t.ms())
    octic_F = Fb * Fp[0].ideal.gens[0] * Fp[1].ideal.gens[0]
    octic = ProjScheme(Ideal(P2w, [octic_F]), "Γ'")
    So = singular_locus(octic, 1)
    report.record("degenerate: certified nodes of Γ'", 21, _nodal_count(octic_F, So), millis=t.ms())
    P5 = Ring(6, prime, names=tuple(f"y{i}" for i in range(6)))
    phi = RationalMapModel(P2w, tuple(qua.forms), P5)
    T = image_scheme(phi, None, max_degree=3, name="T")
    report.record("degenerate: T (dim, deg)", [2, 7], _hd_triple(T)[:2], millis=t.ms())
    Bimg = image_scheme(phi, Bp, max_degree=4, name="B")
    Fimg = [image_scheme(phi, F, max_degree=3, name="F") for F in Fp]
    report.record("degenerate: φ(B') (dim, deg, p_a)", [1, 8, 2], _hd_triple(Bimg), millis=t.ms())
    report.record("degenerate: F_i twisted cubics", [[1, 3, 0], [1, 3, 0]], [_hd_triple(F) for F in Fimg],
                  millis=t.ms())
    report.record("degenerate: F_1 ∩ F_2 empty", True,
                  ProjScheme.from_ideal(Fimg[0].ideal + Fimg[1].ideal).is_empty(), millis=t.ms())
    report.record("degenerate: F_i · B", [6, 6], [intersection_length(F, Bimg) for F in Fimg], millis=t.ms())
    G = image_scheme(phi, octic, max_degree=4, name="Γ")
    report.record("degenerate: Γ = B + F_1 + F_2 (dim, deg, p_a)", [1, 14, 12], _hd_triple(G), millis=t.ms())
    art = PipelineArtifacts(scroll=scroll, ell=ell, C_plane=b * rul[0] * rul[1], octic=octic,
                            octic_sing=So, o_scheme=ProjScheme(o_ideal, "o"), J=cub.forms[0], phi=phi,
                            T=T, Gamma=G)
    art.extra.update(B=Bz, B_plane=Bp, rulings=Fz, ruling_images=Fp, o9=o9)
    report.retries = counter.count
    return art, report


def _ordinary_double_at_origin(f) -> bool:
    """Node at ``o``: the ``u2``-top coefficient is a squarefree binary quadric."""
    W = Ring(2, f.ring.p)
    top = {}
    k = max(e[2] for e in f.terms)
    for e, c in f.terms.items():
        if e[2] == k:
            top[(e[0], e[1])] = c
    if f.degree() - k != 2:
        return False
    q = W.from_terms(top)
    return saturate_irrelevant(Ideal(W, [q, q.diff(0), q.diff(1)])).is_unit()


# -- C = Γ1 + Γ2 -------------------------------------------------------------------------------


def fixture_two_rational(prime: int = 32003, retry_budget: int = 20, seed: int = 0, scroll_check=True):
    """Two rational curves in ``|3h - 2E|``: quartic images, the 5 + 3 + 8 split and the scroll."""
    counter = RetryCounter(retry_budget)
    attempt = 0
    while True:
        rng = random.Random(f"fixture-two-rational:{seed}:{prime}:{attempt}")
        try:
            return _two_rational(prime, rng, counter, scroll_check)
        except GenericityError as exc:
            attempt += 1
            counter.bump(str(exc))


def _two_rational(prime, rng, counter, scroll_check):
    report = VerificationReport(0, prime)
    t = _Timer()
    scroll = build_cubic_scroll(prime)
    P2 = scroll.plane
    u2 = P2.var(2)
    g = [u2 * _binary(P2, rng, 2) + _binary(P2, rng, 3) for _ in range(2)]
    if not all(_ordinary_double_at_origin(f) and smooth_away_from_origin(f) for f in g):
        raise GenericityError("a cubic is singular away from its node")
    Gz = [image_scheme(scroll.embedding, ProjScheme(Ideal(P2, [f])), max_degree=3, name=f"Γ{i + 1}")
          for i, f in enumerate(g)]
    vs = saturate(Ideal(P2, g), point_ideal(P2, ORIGIN))
    report.record("two-rational: Γ_i on Z (dim, deg, p_a)", [[1, 4, 0], [1, 4, 0]],
                  [_hd_triple(G) for G in Gz], millis=t.ms())
    report.record("two-rational: Γ_1·Γ_2 on Z", 5, intersection_length(Gz[0], Gz[1]), millis=t.ms())
    if scheme_length(vs) != 5 or not point_data(vs).is_reduced:
        raise GenericityError("Γ_1 and Γ_2 are not transverse")
    ell = _random_line(scroll, rng, counter)
    Gp = [project_from(G, ell, max_degree=4) for G in Gz]
    Fs = [G.ideal.gens[0] for G in Gp]
    Ss = [singular_locus(G, 1) for G in Gp]
    counts = [_nodal_count(F, S) for F, S in zip(Fs, Ss)]
    if counts != [3, 3]:
        raise GenericityError("plane quartics are not 3-nodal")
    report.record("two-rational: Γ'_i degrees", [4, 4], [F.degree() for F in Fs], millis=t.ms())
    report.record("two-rational: certified nodes of Γ'_i", [3, 3], counts, millis=t.ms())
    P2w = Gp[0].ring
    q = _net(scroll, ell)
    inter = saturate_irrelevant(Ideal(P2w, Fs))
    vimg = image_scheme(RationalMapModel(P2, tuple(q), P2w), ProjScheme(vs), max_degree=5)
    rest = saturate_irrelevant(colon_truncated(inter, vimg.ideal, 6))
    data = point_data(rest)
    if (scheme_length(inter) != 16 or scheme_length(vimg.ideal) != 5 or data.length != 11
            or not data.is_reduced):
        raise GenericityError("quartics do not meet in 16 reduced points")
    chosen = _three_subset(data.factors)
    if chosen is None:
        raise GenericityError("no Galois-stable triple among the apparent nodes")
    o789 = orbit_subscheme(rest, data, chosen)
    others = [f for f in data.factors if f not in chosen]
    nprime_scheme = orbit_subscheme(rest, data, others)
    report.record("two-rational: Γ'_1 ∩ Γ'_2 split", [5, 3, 8],
                  [scheme_length(vimg.ideal), scheme_length(o789), scheme_length(nprime_scheme)], millis=t.ms())
    o_ideal = intersect(intersect(Ss[0].ideal, Ss[1].ideal), o789)
    cub, qua = _nine_point_maps(P2w, o_ideal)
    if cub.dim != 1 or qua.dim != 6 or not _smooth_plane_cubic(cub.forms[0]):
        raise GenericityError("no unique smooth cubic through the nine points")
    report.record("two-rational: cubics through o_1..o_9", 1, cub.dim, millis=t.ms())
    report.record("two-rational: that cubic smooth", True, _smooth_plane_cubic(cub.forms[0]), millis=t.ms())
    P5 = Ring(6, prime, names=tuple(f"y{i}" for i in range(6)))
    phi = RationalMapModel(P2w, tuple(qua.forms), P5)
    octic = ProjScheme(Ideal(P2w, [Fs[0] * Fs[1]]), "Γ'")
    G = image_scheme(phi, octic, max_degree=4, name="Γ")
    Gi = [image_scheme(phi, X, max_degree=4, name=f"Γ{i + 1}") for i, X in enumerate(Gp)]
    report.record("two-rational: Γ_i in P^5 (dim, deg, p_a)", [[1, 7, 0], [1, 7, 0]],
                  [_hd_triple(X) for X in Gi], millis=t.ms())
    report.record("two-rational: Γ (dim, deg, p_a)", [1, 14, 12], _hd_triple(G), millis=t.ms())
    report.record("two-rational: Γ_1·Γ_2 in P^5", 13, intersection_length(Gi[0], Gi[1]), millis=t.ms())
    nodes = image_scheme(phi, ProjScheme(nprime_scheme), max_degree=4, name="n")
    art = PipelineArtifacts(scroll=scroll, ell=ell, net=q, C_plane=g[0] * g[1], octic=octic,
                            o_scheme=ProjScheme(o_ideal, "o"), J=cub.forms[0], phi=phi, Gamma=G)
    art.extra.update(components=Gi, v_images=vimg, nprime_scheme=nprime_scheme, node_scheme=nodes)
    if scroll_check:
        R, secant = reconstruct_scroll(g[0] * g[1], q, phi)
        art.R, art.secant_forms = R, secant
        report.record("two-rational: R (dim, deg)", [2, 9], _hd_triple(R)[:2], millis=t.ms())
        report.record("two-rational: Γ ⊂ R", True, G.ideal.contains_ideal(R.ideal), millis=t.ms())
        cand = singular_candidates(R, graded_piece(R.ideal, 3), 3, count=4, seed=3)
        sing = classify_against(R, cand, nodes.ideal, "surface")
        report.record("two-rational: singular points of R", 8, sing.singular, millis=t.ms())
        report.record("two-rational: they are φ(n'_1..n'_8)", 8, sing.expected_found, millis=t.ms())
        report.record("two-rational: R has no further singular points", True, sing.ok, millis=t.ms())
        report.record("two-rational: n_9..n_13 not singular on R", True,
                      not singular_along(R, image_scheme(phi, vimg, max_degree=4).ideal), millis=t.ms())
    report.retries = counter.count
    return art, report


def _three_subset(factors):
    """First set of Galois orbits (by factor list order) of total size 3."""
    from itertools import combinations
    for k in (1, 2, 3):
        for sub in combinations(factors, k):
            if sum(len(f) - 1 for f in sub) == 3:
                return list(sub)
    return None


def fixture_checks(report: VerificationReport, prime: int = 32003, retry_budget: int = 20):
    """Append both fixtures' checks to ``report``."""
    for fn in (fixture_degenerate_rulings, fixture_two_rational):
        _, sub = fn(prime, retry_budget)
        report.checks.extend(sub.checks)
        report.retries += sub.retries
