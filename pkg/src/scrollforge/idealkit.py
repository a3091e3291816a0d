"""Groebner bases over F_p and the ideal algebra built on them.

The engine is Buchberger's algorithm with the normal/sugar selection
strategy and Gebauer-Moeller pair pruning; all S-pairs of the lowest sugar
degree are reduced together in one matrix (F4-style batching), which turns
the expensive part into mod-p row reduction.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import kernel, rank, reduce_rows, rref
from .polycore import (
    MonomialOrder, Polynomial, Ring, block, mono_coprime, mono_div, mono_divides,
    mono_lcm, monomials, num_monomials,
)

log = logging.getLogger(__name__)


class BudgetError(RuntimeError):
    """A Groebner computation exceeded its resource caps."""


@dataclass
class Budget:
    max_pairs: int = 2_000_000
    max_basis: int = 20_000
    max_matrix_cells: int = 400_000_000


DEFAULT_BUDGET = Budget()


# -- matrix plumbing -------------------------------------------------------------


def _matrix(rows, ring: Ring, extra_cols=()):
    """Dense matrix of ``rows`` (term dicts) with columns sorted descending."""
    cols = set(extra_cols)
    for r in rows:
        cols.update(r)
    key = ring.key
    cols = sorted(cols, key=key, reverse=True)
    index = {m: j for j, m in enumerate(cols)}
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, r in enumerate(rows):
        for m, c in r.items():
            M[i, index[m]] = c
    return M, cols


def _rows_to_dicts(R, cols):
    out = []
    for row in R:
        nzc = np.nonzero(row)[0]
        out.append({cols[j]: int(row[j]) for j in nzc})
    return out


def _mul_terms(terms, u, p=None):
    return {tuple(a + b for a, b in zip(e, u)): c for e, c in terms.items()}


class _Basis:
    """Mutable state of one Groebner computation."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.polys = []   # term dicts, monic
        self.lms = []
        self.sugar = []
        self.active = []  # indices not made redundant

    def find_reducer(self, m):
        best = None
        for i in self.active:
            lm = self.lms[i]
            if mono_divides(lm, m):
                if best is None or len(self.polys[i]) < len(self.polys[best]):
                    best = i
        return best


def _symbolic_preprocessing(rows, basis: _Basis, seen_rows):
    """Add reducer rows for every monomial divisible by a leading monomial."""
    done = set()
    todo = set()
    for r in rows:
        todo.update(r)
    lead_of_rows = set()
    while todo:
        m = todo.pop()
        if m in done:
            continue
        done.add(m)
        i = basis.find_reducer(m)
        if i is None:
            continue
        u = mono_div(m, basis.lms[i])
        if (i, u) in seen_rows:
            lead_of_rows.add(m)
            continue
        seen_rows.add((i, u))
        r = _mul_terms(basis.polys[i], u)
        rows.append(r)
        lead_of_rows.add(m)
        for t in r:
            if t not in done:
                todo.add(t)
    return lead_of_rows


def _gm_update(basis: _Basis, pairs, h):
    """Gebauer-Moeller update of the pair list after adding element ``h``."""
    lms = basis.lms
    lm_h = lms[h]
    cand = [(g, mono_lcm(lm_h, lms[g])) for g in basis.active]
    # chain criterion among the new pairs: drop lcms strictly divisible by another
    lcms = {l for _, l in cand}
    cand = [(g, l) for g, l in cand
            if not any(l2 != l and mono_divides(l2, l) for l2 in lcms)]
    # one pair per lcm class; a coprime member kills the whole class
    classes = {}
    for g, l in cand:
        classes.setdefault(l, []).append(g)
    new_pairs = []
    for l, gs in classes.items():
        if any(mono_coprime(lm_h, lms[g]) for g in gs):
            continue
        new_pairs.append((gs[0], l))
    kept = []
    for (i, j, l, s) in pairs:
        if (mono_divides(lm_h, l) and mono_lcm(lms[i], lm_h) != l
                and mono_lcm(lms[j], lm_h) != l):
            continue
        kept.append((i, j, l, s))
    for g, l in new_pairs:
        s = max(basis.sugar[h] + sum(l) - sum(lm_h), basis.sugar[g] + sum(l) - sum(lms[g]))
        kept.append((g, h, l, s))
    basis.active = [g for g in basis.active if not mono_divides(lm_h, lms[g])] + [h]
    return kept


def _lead(terms, ring):
    key = ring.key
    return max(terms, key=key)


def _monic(terms, ring):
    lm = _lead(terms, ring)
    inv = pow(terms[lm], ring.p - 2, ring.p)
    p = ring.p
    return {e: c * inv % p for e, c in terms.items()}, lm


def groebner_basis(gens, ring: Ring | None = None, budget: Budget = DEFAULT_BUDGET):
    """Reduced Groebner basis of ``gens`` with respect to ``ring.order``."""
    gens = [g for g in gens if not g.is_zero()]
    if ring is None:
        if not gens:
            raise ValueError("ring required for the zero ideal")
        ring = gens[0].ring
    if not gens:
        return []
    p = ring.p
    basis = _Basis(ring)
    pending = []  # input generators, processed by sugar like pairs
    for g in gens:
        if g.is_constant():
            return [ring.one()]
        pending.append((dict(g.terms), g.degree()))
    pairs = []
    npairs = 0
    while pairs or pending:
        d = min([s for *_, s in pairs] + [s for _, s in pending])
        sel_pairs = [q for q in pairs if q[3] == d]
        pairs = [q for q in pairs if q[3] != d]
        sel_inputs = [t for t, s in pending if s == d]
        pending = [(t, s) for t, s in pending if s != d]
        npairs += len(sel_pairs)
        if npairs > budget.max_pairs:
            raise BudgetError(f"pair budget {budget.max_pairs} exceeded")
        rows = []
        seen = set()
        for i, j, l, _ in sel_pairs:
            for k in (i, j):
                u = mono_div(l, basis.lms[k])
                if (k, u) not in seen:
                    seen.add((k, u))
                    rows.append(_mul_terms(basis.polys[k], u))
        rows.extend(sel_inputs)
        reducer_leads = _symbolic_preprocessing(rows, basis, seen)
        M, cols = _matrix(rows, ring)
        if M.size > budget.max_matrix_cells:
            raise BudgetError(f"matrix {M.shape} exceeds cell budget")
        R, piv = rref(M, p)
        known = reducer_leads
        new = []
        for row, c in zip(R, piv):
            m = cols[c]
            if m in known:
                continue
            if basis.find_reducer(m) is not None:
                continue
            nzc = np.nonzero(row)[0]
            new.append({cols[j]: int(row[j]) for j in nzc})
        new.sort(key=lambda t: ring.key(_lead(t, ring)))
        for t in new:
            t, lm = _monic(t, ring)
            if not any(lm):
                return [ring.one()]
            basis.polys.append(t)
            basis.lms.append(lm)
            basis.sugar.append(d)
            h = len(basis.polys) - 1
            pairs = _gm_update(basis, pairs, h)
            if len(basis.polys) > budget.max_basis:
                raise BudgetError(f"basis budget {budget.max_basis} exceeded")
    return _reduce_basis(basis, ring)


def _reduce_basis(basis: _Basis, ring: Ring):
    lms = basis.lms
    minimal = []
    for i in basis.active:
        if not any(j != i and mono_divides(lms[j], lms[i]) and (lms[j] != lms[i] or j < i)
                   for j in basis.active):
            minimal.append(i)
    homogeneous = all(len({sum(e) for e in basis.polys[i]}) == 1 for i in minimal)
    mini = _Basis(ring)
    for i in minimal:
        mini.polys.append(basis.polys[i])
        mini.lms.append(lms[i])
        mini.active.append(len(mini.polys) - 1)
    groups = {}
    for k in mini.active:
        groups.setdefault(sum(mini.lms[k]) if homogeneous else 0, []).append(k)
    out = []
    p = ring.p
    for _, idxs in sorted(groups.items()):
        rows = []
        seen = set()
        targets = []
        for k in idxs:
            # tails only: reducers for non-leading monomials
            rows.append(mini.polys[k])
            seen.add((k, (0,) * ring.nvars))
            targets.append(mini.lms[k])
        _symbolic_preprocessing(rows, mini, seen)
        M, cols = _matrix(rows, ring)
        R, piv = rref(M, p)
        want = set(targets)
        for row, c in zip(R, piv):
            if cols[c] in want:
                nzc = np.nonzero(row)[0]
                out.append(Polynomial(ring, {cols[j]: int(row[j]) for j in nzc}))
    out.sort(key=lambda f: ring.key(f.lead_monomial()), reverse=True)
    return out


# -- Groebner basis objects ----------------------------------------------------------


@dataclass(frozen=True)
class GroebnerBasis:
    ring: Ring
    elements: tuple

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    def lead_monomials(self):
        return [g.lead_monomial() for g in self.elements]

    def is_unit(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.elements)

    def normal_form(self, f: Polynomial) -> Polynomial:
        return normal_forms([f], self)[0]


def normal_forms(polys, G: GroebnerBasis):
    """Remainders of ``polys`` on division by ``G`` (no term divisible by a lead term)."""
    ring = G.ring
    if not polys:
        return []
    if G.is_unit():
        return [ring.zero() for _ in polys]
    if not G.elements:
        return [f.with_ring(ring) for f in polys]
    basis = _Basis(ring)
    for g in G.elements:
        basis.polys.append(dict(g.terms))
        basis.lms.append(g.lead_monomial())
        basis.active.append(len(basis.polys) - 1)
    targets = [dict(f.terms) for f in polys]
    reducers = []
    _symbolic_preprocessing_from(targets, basis, reducers)
    if not reducers:
        return [Polynomial(ring, dict(t)) for t in targets]
    cols_extra = set()
    for t in targets:
        cols_extra.update(t)
    M, cols = _matrix(reducers, ring, cols_extra)
    index = {m: j for j, m in enumerate(cols)}
    T = np.zeros((len(targets), len(cols)), dtype=np.int64)
    for i, t in enumerate(targets):
        for m, c in t.items():
            T[i, index[m]] = c
    R, piv = rref(M, ring.p)
    T = reduce_rows(T, R, piv, ring.p)
    return [Polynomial(ring, d) for d in _rows_to_dicts(T, cols)]


def _symbolic_preprocessing_from(targets, basis, reducers):
    done = set()
    todo = set()
    for t in targets:
        todo.update(t)
    while todo:
        m = todo.pop()
        if m in done:
            continue
        done.add(m)
        i = basis.find_reducer(m)
        if i is None:
            continue
        r = _mul_terms(basis.polys[i], mono_div(m, basis.lms[i]))
        reducers.append(r)
        for t in r:
            if t not in done:
                todo.add(t)


# -- Hilbert series of monomial ideals ------------------------------------------------


def _hilbert_numerator(gens, n):
    """Numerator ``N(t)`` (coefficient list) of the Hilbert series ``N(t)/(1-t)^n``."""
    gens = _minimalize(gens)
    return _hn(tuple(sorted(gens)), n, {})


def _minimalize(gens):
    gens = sorted(set(gens), key=sum)
    out = []
    for g in gens:
        if not any(mono_divides(h, g) for h in out):
            out.append(g)
    return out


def _poly_sub_shift(a, b, shift):
    out = list(a) + [0] * max(0, len(b) + shift - len(a))
    for i, c in enumerate(b):
        out[i + shift] -= c
    return out


def _hn(gens, n, memo):
    if gens in memo:
        return memo[gens]
    if not gens:
        res = [1]
    elif any(not any(g) for g in gens):
        res = [0]
    elif all(sum(1 for x in g if x) == 1 for g in gens):
        # pure powers of distinct variables: product of (1 - t^a)
        res = [1]
        for g in gens:
            a = sum(g)
            res = _poly_sub_shift(res, res, a)
    else:
        # pivot on a variable of a non-pure generator
        g = next(g for g in gens if sum(1 for x in g if x) > 1)
        i = max((v for v in range(n) if g[v]), key=lambda v: sum(1 for h in gens if h[v]))
        piv = tuple(int(v == i) for v in range(n))
        # N(I) = N(I + x_i) + t * N(I : x_i) - ... use  N(I) = N(I + (x)) + t N(I : x)
        plus = _minimalize(list(gens) + [piv])
        colon = _minimalize([tuple(max(0, h[v] - (v == i)) for v in range(n)) for h in gens])
        a = _hn(tuple(sorted(plus)), n, memo)
        b = _hn(tuple(sorted(colon)), n, memo)
        res = list(a) + [0] * max(0, len(b) + 1 - len(a))
        for k, c in enumerate(b):
            res[k + 1] += c
    while len(res) > 1 and res[-1] == 0:
        res.pop()
    memo[gens] = res
    return res


@dataclass
class HilbertData:
    dim: int                      # projective dimension (-1 for the empty scheme)
    degree: int
    hilbert_poly: tuple           # coefficients of HP(t) in the power basis, low to high
    pa: int | None = None         # arithmetic genus, for curves
    numerator: tuple = field(default=(), repr=False)

    def hp(self, t: int) -> Fraction:
        return sum(Fraction(c) * t ** k for k, c in enumerate(self.hilbert_poly))


def _binom_poly(shift, k):
    """Coefficients of C(t + shift, k) as a polynomial in t."""
    coeffs = [Fraction(1)]
    for j in range(k):
        # multiply by (t + shift - j) / (j + 1)
        c0 = Fraction(shift - j, j + 1)
        c1 = Fraction(1, j + 1)
        new = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i] += c * c0
            new[i + 1] += c * c1
        coeffs = new
    return coeffs


def hilbert_from_numerator(num, nvars) -> HilbertData:
    num = list(num)
    k = 0
    q = num[:]
    # divide by (1 - t) while q(1) == 0
    while q and sum(q) == 0 and k < nvars:
        out = []
        acc = 0
        for c in q[:-1]:
            acc += c
            out.append(acc)
        q = out
        k += 1
    if not q or all(c == 0 for c in q):
        return HilbertData(-1, 0, (), None, tuple(num))
    krull = nvars - k
    degree = sum(q)
    if krull == 0:
        return HilbertData(-1, 0, (), None, tuple(num))
    # HS = q(t)/(1-t)^krull ; t^i/(1-t)^D contributes C(t - i + D - 1, D - 1)
    hp = [Fraction(0)] * krull
    for i, c in enumerate(q):
        for j, b in enumerate(_binom_poly(krull - 1 - i, krull - 1)):
            hp[j] += c * b
    hp = tuple(int(c) if c.denominator == 1 else c for c in hp)
    dim = krull - 1
    pa = None
    if dim == 1:
        pa = 1 - int(hp[0])
    return HilbertData(dim, degree, hp, pa, tuple(num))


def graded_dim_from_numerator(num, nvars, d) -> int:
    return sum(c * num_monomials(nvars, d - i) for i, c in enumerate(num) if d - i >= 0)


# -- ideals ---------------------------------------------------------------------------


class Ideal:
    """Homogeneous ideal given by generators; Groebner bases cached per order."""

    def __init__(self, ring: Ring, gens=()):
        self.ring = ring
        seen = set()
        out = []
        for g in gens:
            g = g.with_ring(ring) if g.ring is not ring else g
            if g.is_zero():
                continue
            g = g.monic()
            if g not in seen:
                seen.add(g)
                out.append(g)
        self.gens = tuple(out)
        self._gb = {}

    def __repr__(self):
        return f"Ideal({len(self.gens)} gens in {self.ring.nvars} vars)"

    @property
    def nvars(self):
        return self.ring.nvars

    def is_homogeneous(self):
        return all(g.is_homogeneous() for g in self.gens)

    def groebner(self, order=None, budget: Budget = DEFAULT_BUDGET) -> GroebnerBasis:
        order = order or self.ring.order
        if not isinstance(order, MonomialOrder):
            order = MonomialOrder.parse(order)
        if order not in self._gb:
            r = self.ring.with_order(order)
            els = groebner_basis([g.with_ring(r) for g in self.gens], r, budget)
            self._gb[order] = GroebnerBasis(r, tuple(els))
        return self._gb[order]

    def reduced(self) -> Ideal:
        """Same ideal, generated by its reduced degrevlex basis."""
        G = self.groebner()
        I = Ideal(self.ring, G.elements)
        I._gb[self.ring.order] = G
        return I

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def is_zero(self) -> bool:
        return not self.gens

    def contains(self, f: Polynomial) -> bool:
        return self.groebner().normal_form(f).is_zero()

    def contains_ideal(self, other: Ideal) -> bool:
        G = self.groebner()
        return all(r.is_zero() for r in normal_forms(list(other.gens), G))

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        a = self.groebner().elements
        b = other.groebner(self.ring.order).elements
        return [g.terms for g in a] == [g.terms for g in b]

    __hash__ = None

    def __add__(self, other):
        return ideal_sum(self, other)

    def __mul__(self, other):
        return ideal_product(self, other)

    def hilbert_numerator(self):
        lms = [g.lead_monomial() for g in self.groebner().elements]
        return _hilbert_numerator(lms, self.nvars)

    def graded_dim(self, d: int) -> int:
        return graded_dim(self, d)

    def hilbert_data(self) -> HilbertData:
        return hilbert_data(self)

    def to_file(self) -> str:
        return ideal_to_text(self)


def normal_form(f: Polynomial, G) -> Polynomial:
    if isinstance(G, Ideal):
        G = G.groebner()
    return G.normal_form(f)


def groebner(I: Ideal, order=None, budget: Budget = DEFAULT_BUDGET) -> GroebnerBasis:
    return I.groebner(order, budget)


def graded_dim(I: Ideal, d: int) -> int:
    """``dim (S/I)_d`` counted by standard monomials of a Groebner basis."""
    if I.is_zero():
        return num_monomials(I.nvars, d)
    return graded_dim_from_numerator(I.hilbert_numerator(), I.nvars, d)


def hilbert_data(I: Ideal) -> HilbertData:
    if I.is_zero():
        n = I.nvars
        return hilbert_from_numerator([1], n)
    return hilbert_from_numerator(I.hilbert_numerator(), I.nvars)


def macaulay_corank(gens, ring: Ring, d: int) -> int:
    """``dim S_d - rank`` of the matrix of all degree-``d`` monomial multiples of ``gens``.

    Independent of any Groebner basis; for homogeneous generators this is
    ``dim (S/I)_d``.
    """
    cols = monomials(ring.nvars, d)
    index = {m: j for j, m in enumerate(cols)}
    rows = []
    for g in gens:
        e = g.degree()
        if g.is_zero() or e > d:
            continue
        for u in monomials(ring.nvars, d - e):
            row = np.zeros(len(cols), dtype=np.int64)
            for m, c in g.terms.items():
                row[index[tuple(a + b for a, b in zip(m, u))]] = c
            rows.append(row)
    if not rows:
        return len(cols)
    return len(cols) - rank(np.array(rows), ring.p)


def graded_piece(I: Ideal, d: int):
    """Basis (as polynomials) of ``I_d``, via the Groebner basis."""
    ring = I.ring
    mons = monomials(ring.nvars, d)
    polys = [ring.monomial(m) for m in mons]
    nfs = normal_forms(polys, I.groebner())
    # I_d = kernel of  S_d -> (S/I)_d
    cols = sorted({m for f in nfs for m in f.terms}, key=ring.key, reverse=True)
    index = {m: j for j, m in enumerate(cols)}
    A = np.zeros((len(cols), len(mons)), dtype=np.int64)
    for j, f in enumerate(nfs):
        for m, c in f.terms.items():
            A[index[m], j] = c
    if not cols:
        K = np.eye(len(mons), dtype=np.int64)
    else:
        K = kernel(A, ring.p)
    out = []
    for v in K:
        out.append(ring.from_terms({mons[j]: int(v[j]) for j in np.nonzero(v)[0]}))
    return out


# -- ideal algebra -----------------------------------------------------------------------


def _same_ring(I, J):
    if not I.ring.compatible(J.ring):
        raise ValueError("ideals live in different rings")


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    _same_ring(I, J)
    return Ideal(I.ring, I.gens + J.gens)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    _same_ring(I, J)
    return Ideal(I.ring, [f * g for f in I.gens for g in J.gens])


def _extend(ring: Ring, f: Polynomial, k: int, target: Ring) -> Polynomial:
    """Embed ``f`` into ``target`` whose first ``k`` variables are new."""
    z = (0,) * k
    return Polynomial(target, {z + e: c for e, c in f.terms.items()})


def _restrict(f: Polynomial, k: int, ring: Ring) -> Polynomial:
    return Polynomial(ring, {e[k:]: c for e, c in f.terms.items()})


def eliminate(I: Ideal, k: int, budget: Budget = DEFAULT_BUDGET) -> Ideal:
    """``I`` intersected with the subring of the last ``n - k`` variables.

    The result lives in a ring of ``n - k`` variables.
    """
    n = I.nvars
    sub = Ring(n - k, I.ring.field, I.ring.order, I.ring.names[k:])
    if k == 0:
        return Ideal(sub, I.groebner(budget=budget).elements)
    G = I.groebner(block(k), budget)
    keep = [g for g in G.elements if all(not any(e[:k]) for e in g.terms)]
    return Ideal(sub, [_restrict(g, k, sub) for g in keep])


def intersect(I: Ideal, J: Ideal, budget: Budget = DEFAULT_BUDGET) -> Ideal:
    """``I ∩ J`` by eliminating ``t`` from ``t I + (1 - t) J``."""
    _same_ring(I, J)
    if I.is_zero() or J.is_zero():
        return Ideal(I.ring, [])
    if I.is_unit():
        return J
    if J.is_unit():
        return I
    ring = I.ring
    big = Ring(ring.nvars + 1, ring.field, block(1), ("_t",) + ring.names)
    t = big.var(0)
    gens = [t * _extend(ring, f, 1, big) for f in I.gens]
    gens += [(1 - t) * _extend(ring, g, 1, big) for g in J.gens]
    G = groebner_basis(gens, big, budget)
    keep = [g for g in G if all(e[0] == 0 for e in g.terms)]
    return Ideal(ring, [_restrict(g, 1, ring) for g in keep])


def _linear_change(ring: Ring, matrix):
    """Images of the variables under ``x -> matrix x``."""
    n = ring.nvars
    return [ring.linear_form([matrix[i][j] for j in range(n)]) for i in range(n)]


def _move_linear_form_last(I: Ideal, l: Polynomial, rng=None):
    """Coordinates with ``l`` as the last variable: returns substitution pair."""
    ring = I.ring
    n = ring.nvars
    p = ring.p
    coeffs = [0] * n
    for e, c in l.terms.items():
        coeffs[e.index(1)] = c
    # new basis of linear forms: pick n-1 coordinate forms completing l
    j = max(i for i in range(n) if coeffs[i])
    # y = A x with rows e_i (i != j) and l last
    rows = [[int(i == k) for k in range(n)] for i in range(n) if i != j] + [coeffs]
    A = np.array(rows, dtype=np.int64)
    Ainv = _inverse_mod(A, p)
    # x = Ainv y : substitute into generators
    xs_in_y = _linear_change(ring, Ainv.tolist())
    ys_in_x = _linear_change(ring, A.tolist())
    return xs_in_y, ys_in_x


def _inverse_mod(A, p):
    n = A.shape[0]
    R, piv = rref(np.hstack([A % p, np.eye(n, dtype=np.int64)]), p)
    if len(piv) < n or any(piv[i] != i for i in range(n)):
        raise ValueError("singular matrix")
    return R[:, n:]


def _colon_linear_leads(I: Ideal, l: Polynomial, infinite: bool):
    ring = I.ring
    xs_in_y, ys_in_x = _move_linear_form_last(I, l)
    J = Ideal(ring, [g.compose(xs_in_y, ring) for g in I.gens])
    G = J.groebner()
    n = ring.nvars
    out = []
    for g in G.elements:
        k = min(e[n - 1] for e in g.terms)
        if k:
            s = k if infinite else 1
            g = Polynomial(ring, {e[:-1] + (e[-1] - s,): c for e, c in g.terms.items()})
        out.append(g)
    K = Ideal(ring, [g.compose(ys_in_x, ring) for g in out])
    # in the moved coordinates ``out`` is a Groebner basis of the colon
    return K, [g.lead_monomial() for g in G.elements], [g.lead_monomial() for g in out]


def colon_linear(I: Ideal, l: Polynomial, infinite=False) -> Ideal:
    """``I : l`` (or ``I : l^∞``) for a linear form, by division in degrevlex with ``l`` last."""
    if I.is_unit():
        return I
    return _colon_linear_leads(I, l, infinite)[0]


def colon(I: Ideal, J: Ideal, budget: Budget = DEFAULT_BUDGET) -> Ideal:
    """``I : J`` via intersections ``(I ∩ (g)) / g`` over generators ``g`` of ``J``."""
    _same_ring(I, J)
    ring = I.ring
    result = None
    for g in J.gens:
        if g.degree() == 1:
            K = colon_linear(I, g)
        else:
            inter = intersect(I, Ideal(ring, [g]), budget)
            K = Ideal(ring, [exact_divide(f, g) for f in inter.gens])
        result = K if result is None else intersect(result, K, budget)
    return result if result is not None else Ideal(ring, [ring.one()])


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient of ``f`` by ``g`` when the division is exact."""
    ring = f.ring
    q = {}
    r = dict(f.terms)
    lm_g = g.lead_monomial()
    inv = ring.field.inv(g.terms[lm_g])
    p = ring.p
    key = ring.key
    while r:
        m = max(r, key=key)
        if not mono_divides(lm_g, m):
            raise ValueError("division is not exact")
        u = mono_div(m, lm_g)
        c = r[m] * inv % p
        q[u] = c
        for e, v in g.terms.items():
            t = tuple(a + b for a, b in zip(e, u))
            w = (r.get(t, 0) - c * v) % p
            if w:
                r[t] = w
            else:
                r.pop(t, None)
    return Polynomial(ring, q)


def saturate(I: Ideal, J: Ideal | None = None, budget: Budget = DEFAULT_BUDGET,
             max_iter: int = 50) -> Ideal:
    """``I : J^∞`` by iterated colon until the reduced bases agree.

    With ``J=None`` saturates by the irrelevant ideal, using a random linear
    form (valid away from a proper closed set of choices) cross-checked
    against a second one.
    """
    if J is None:
        return saturate_irrelevant(I)
    if all(g.degree() == 1 for g in J.gens) and len(J.gens) == 1:
        return colon_linear(I, J.gens[0], infinite=True)
    cur = I
    for _ in range(max_iter):
        nxt = colon(cur, J, budget)
        if nxt == cur:
            return cur.reduced()
        cur = nxt
    raise BudgetError("saturation did not stabilize")


def saturate_irrelevant(I: Ideal, seed: int = 0, attempts: int = 8) -> Ideal:
    """``I : m^∞`` as ``I : l^∞`` for a random linear form ``l``.

    A bad ``l`` (one vanishing on a relevant component) changes the Hilbert
    polynomial, so the result is accepted only when it matches that of ``I``.
    """
    ring = I.ring
    if I.is_zero() or I.is_unit():
        return I
    rng = random.Random(f"saturate-{seed}")
    for _ in range(attempts):
        l = ring.linear_form([rng.randrange(1, ring.p) for _ in range(ring.nvars)])
        S, before, after = _colon_linear_leads(I, l, True)
        hp = hilbert_from_numerator(_hilbert_numerator(before, ring.nvars), ring.nvars)
        if S.is_unit():
            if hp.dim < 0:
                return S
            continue
        hs = hilbert_from_numerator(_hilbert_numerator(after, ring.nvars), ring.nvars)
        if hs.hilbert_poly == hp.hilbert_poly:
            return S.reduced()
    raise ArithmeticError("no saturating linear form found")


def ideal_algebra(I: Ideal, J: Ideal, op: str, budget: Budget = DEFAULT_BUDGET) -> Ideal:
    if op == "sum":
        return ideal_sum(I, J)
    if op == "product":
        return ideal_product(I, J)
    if op == "intersection":
        return intersect(I, J, budget)
    if op == "colon":
        return colon(I, J, budget)
    if op == "saturation":
        return saturate(I, J, budget)
    raise ValueError(f"unknown op {op!r}")


# -- ideal file format --------------------------------------------------------------------


def ideal_to_text(I: Ideal) -> str:
    ring = I.ring
    lines = sorted(g.to_text() for g in I.groebner().elements)
    header = f"ring p={ring.p} vars={ring.nvars} order={ring.order.name}"
    return "\n".join([header] + lines) + "\n"


def ideal_from_text(text: str, ring: Ring | None = None) -> Ideal:
    """Parse the file format; ``ring`` supplies variable names (default ``x0..``)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(kv.split("=") for kv in lines[0].split()[1:])
    order = MonomialOrder.parse(head["order"])
    if ring is None:
        ring = Ring(int(head["vars"]), int(head["p"]), order)
    elif (ring.p, ring.nvars, ring.order) != (int(head["p"]), int(head["vars"]), order):
        raise ValueError("file header does not match the ring")
    return Ideal(ring, [ring.parse(ln) for ln in lines[1:]])


# -- graded pieces by linear algebra ----------------------------------------------------------


def coefficient_matrix(polys, cols=None, ring=None):
    """Matrix with one column per polynomial, rows indexed by monomials."""
    if cols is None:
        ms = set()
        for f in polys:
            ms.update(f.terms)
        key = (ring or polys[0].ring).key
        cols = sorted(ms, key=key, reverse=True)
    index = {m: i for i, m in enumerate(cols)}
    A = np.zeros((len(cols), len(polys)), dtype=np.int64)
    for j, f in enumerate(polys):
        for m, c in f.terms.items():
            A[index[m], j] = c
    return A, cols


def kernel_combinations(columns_blocks, n, p):
    """Kernel of the stacked matrices (each with ``n`` columns), as coefficient rows."""
    blocks = [B for B in columns_blocks if B.shape[0]]
    if not blocks:
        return np.eye(n, dtype=np.int64)
    return kernel(np.vstack(blocks), p)


def combine(ring: Ring, basis, coeffs):
    """Polynomials ``sum_j coeffs[k, j] * basis[j]``.

    ``basis`` is a list of monomials or of polynomials.
    """
    p = ring.p
    out = []
    mono = bool(basis) and isinstance(basis[0], tuple)
    for row in coeffs:
        acc = {}
        for j in np.nonzero(row)[0]:
            c = int(row[j])
            if mono:
                acc[basis[j]] = (acc.get(basis[j], 0) + c) % p
            else:
                for m, v in basis[j].terms.items():
                    acc[m] = (acc.get(m, 0) + c * v) % p
        out.append(Polynomial(ring, {m: v for m, v in acc.items() if v}))
    return out


def colon_piece(I: Ideal, gens, d: int):
    """Basis of ``{f in S_d : f g in I for all g in gens}`` by normal forms."""
    ring = I.ring
    mons = monomials(ring.nvars, d)
    G = I.groebner()
    blocks = []
    for g in gens:
        prods = [g.mul_monomial(m) for m in mons]
        nfs = normal_forms(prods, G)
        A, _ = coefficient_matrix(nfs, ring=ring) if any(not f.is_zero() for f in nfs) else (
            np.zeros((0, len(mons)), dtype=np.int64), None)
        blocks.append(A)
    K = kernel_combinations(blocks, len(mons), ring.p)
    return combine(ring, list(mons), K)


def ideal_from_pieces(ring: Ring, pieces) -> Ideal:
    """Ideal generated by the given graded pieces (lists of forms), minimalized."""
    gens = []
    for d in sorted(pieces):
        gens.extend(pieces[d])
    return Ideal(ring, gens)


def colon_truncated(I: Ideal, J: Ideal, max_degree: int) -> Ideal:
    """Subideal of ``I : J`` generated in degrees ``<= max_degree``."""
    pieces = {}
    for d in range(max_degree + 1):
        pieces[d] = colon_piece(I, J.gens, d)
        if pieces[d] and any(f.is_constant() for f in pieces[d]):
            return Ideal(I.ring, [I.ring.one()])
    return ideal_from_pieces(I.ring, pieces)
