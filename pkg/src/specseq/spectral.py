"""Bigraded spectral sequences with bounded support.

A page is a finite family of groups indexed by positions (p, q) inside a
declared rectangle, with differentials of a fixed bidegree.  Page turning
replaces each position by the homology subquotient, and the engine keeps the
accumulated cycle/boundary subgroups inside the *starting* page, so that
every later page is presented as a canonical subquotient Z/B of the original
objects.  This anchoring is what lets independently computed pages (e.g. from
an exact couple) be compared for equality rather than mere isomorphism.

Bounded support makes E-infinity finitely computable: once the differential
bidegree leaves the bounding rectangle in both directions, the pages are
stationary.
"""

from __future__ import annotations

from typing import Callable, Dict, Optional, Tuple

from .zlinalg import (
    FPAbGroup,
    Hom,
    NotWellDefined,
    Subgroup,
    SubquotientData,
    induced_map,
    subquotient,
)

Position = Tuple[int, int]


class NotADifferential(Exception):
    """d did not square to zero, or endpoints mismatch; carries a witness."""


class NotAMorphism(Exception):
    """A claimed morphism fails a commuting square; carries a witness."""


class UnboundedSupport(Exception):
    """Stabilization cannot be certified for the given bidegree rule."""


_TRIVIAL = FPAbGroup()


def homological_rule(r: int) -> Position:
    return (-r, r - 1)


def cohomological_rule(r: int) -> Position:
    return (r, -r + 1)


def explicit_rule(r0: int, bidegrees) -> Callable[[int], Position]:
    """Bidegree rule from a finite list; past the list the differentials are
    declared zero and the reported bidegree is irrelevant."""
    table = {r0 + i: tuple(v) for i, v in enumerate(bidegrees)}

    def rule(r: int) -> Position:
        return table.get(r, (0, 0))

    rule.explicit_up_to = r0 + len(table)  # type: ignore[attr-defined]
    return rule


class BigradedGroup:
    """Finitely supported bigraded family of groups inside a bounds rectangle."""

    def __init__(self, bounds, support: Dict[Position, FPAbGroup]):
        (pmin, pmax), (qmin, qmax) = bounds
        self.bounds = ((pmin, pmax), (qmin, qmax))
        self.support = {}
        for x, G in support.items():
            if G.is_trivial():
                continue
            if not self.in_bounds(x):
                raise UnboundedSupport(x)
            self.support[tuple(x)] = G

    def in_bounds(self, x: Position) -> bool:
        (pmin, pmax), (qmin, qmax) = self.bounds
        return pmin <= x[0] <= pmax and qmin <= x[1] <= qmax

    def at(self, x: Position) -> FPAbGroup:
        return self.support.get(tuple(x), _TRIVIAL)

    def positions(self):
        return sorted(self.support)

    def __eq__(self, other):
        return (
            isinstance(other, BigradedGroup)
            and self.bounds == other.bounds
            and self.support == other.support
        )

    def __repr__(self):
        return "BigradedGroup(%r, %r)" % (self.bounds, self.support)


class Page:
    """One page: objects plus differentials of a fixed bidegree.

    Differentials are given only where nonzero; ``d_at`` fills in zero maps.
    """

    def __init__(self, objects: BigradedGroup, bidegree: Position, diffs: Dict[Position, Hom]):
        self.objects = objects
        self.bidegree = tuple(bidegree)
        self.diffs = {}
        v = self.bidegree
        for x, d in diffs.items():
            x = tuple(x)
            tgt = (x[0] + v[0], x[1] + v[1])
            if d.domain != objects.at(x) or d.codomain != objects.at(tgt):
                raise NotADifferential(("endpoints", x))
            if not d.is_zero():
                self.diffs[x] = d
        # verify d o d = 0
        for x, d in self.diffs.items():
            tgt = (x[0] + v[0], x[1] + v[1])
            nxt = self.d_at(tgt)
            if not nxt.compose(d).is_zero():
                raise NotADifferential(("square", x))

    def d_at(self, x: Position) -> Hom:
        x = tuple(x)
        if x in self.diffs:
            return self.diffs[x]
        v = self.bidegree
        return Hom.zero_map(
            self.objects.at(x), self.objects.at((x[0] + v[0], x[1] + v[1]))
        )


def turn_page(page: Page):
    """Homology of a page: E'_x = Ker d_x / Im d_{x-v}.

    Returns ``(objects, tau)`` where ``tau[x]`` is the subquotient data of
    ``E'_x`` inside ``E_x`` (its ``project`` is the epimorphism from the
    cycle subgroup, its ``lift`` a section).
    """
    v = page.bidegree
    tau: Dict[Position, SubquotientData] = {}
    support: Dict[Position, FPAbGroup] = {}
    positions = set(page.objects.positions())
    for x in positions:
        Zx = page.d_at(x).kernel()
        Bx = page.d_at((x[0] - v[0], x[1] - v[1])).image()
        sq = subquotient(Zx, Bx)
        tau[x] = sq
        if not sq.group.is_trivial():
            support[x] = sq.group
    return BigradedGroup(page.objects.bounds, support), tau


class SpectralSequence:
    """A spectral sequence built page by page from a starting page.

    The differentials of each page are *data*: they are supplied via
    ``advance`` (pages whose differentials are never supplied get zero).  The
    engine accumulates, per position, the nested cycle and boundary subgroups
    of the starting page, so ``cycles_boundaries`` and ``e_infinity`` are
    exact subquotients of E^{r0}.
    """

    def __init__(self, r0: int, first_page: Page, bidegree_rule: Callable[[int], Position]):
        if tuple(bidegree_rule(r0)) != first_page.bidegree:
            raise NotADifferential(("bidegree rule mismatch at first page", r0))
        self.r0 = r0
        self.rule = bidegree_rule
        self.pages = [first_page]
        # cumulative Z/B subgroups of E^{r0}_x and the subquotient presenting
        # the current page inside the first one
        amb = first_page.objects
        self.cumulative = [
            {
                x: (Subgroup.full(amb.at(x)), Subgroup.zero(amb.at(x)))
                for x in amb.positions()
            }
        ]
        self._sq = [
            {
                x: subquotient(Subgroup.full(amb.at(x)), Subgroup.zero(amb.at(x)))
                for x in amb.positions()
            }
        ]

    # -- paging --------------------------------------------------------------

    @property
    def top_r(self) -> int:
        return self.r0 + len(self.pages) - 1

    def page(self, r: int) -> Page:
        if not (self.r0 <= r <= self.top_r):
            raise ValueError("page %d not materialized" % r)
        return self.pages[r - self.r0]

    def advance(self, next_diffs: Optional[Dict[Position, Hom]] = None) -> Page:
        """Turn the top page and install the given differentials on the result."""
        cur = self.pages[-1]
        objects, tau = turn_page(cur)
        r_next = self.top_r + 1
        ambient = self.pages[0].objects
        cum_prev = self.cumulative[-1]
        cum_next = {}
        sq_next = {}
        for x in ambient.positions():
            Zbar, Bbar = cum_prev[x]
            sq = self._sq[-1][x]
            if x in tau:
                K = tau[x].Z  # Ker d_x inside E^r_x
                I = tau[x].B  # Im d_{x-v} inside E^r_x
            else:
                # position already trivial on the current page
                K = Subgroup.zero(cur.objects.at(x))
                I = Subgroup.zero(cur.objects.at(x))
            amb_x = ambient.at(x)
            z_gens = [sq.lift(c) for c in K.basis]
            b_gens = [sq.lift(c) for c in I.basis]
            Znew = Subgroup.from_generators(amb_x, z_gens + list(Bbar.basis))
            Bnew = Subgroup.from_generators(amb_x, b_gens + list(Bbar.basis))
            cum_next[x] = (Znew, Bnew)
            sq_next[x] = subquotient(Znew, Bnew)
        # present the new page through the anchored subquotients so that all
        # stored pages share the E^{r0} coordinates
        support = {
            x: sq_next[x].group
            for x in ambient.positions()
            if not sq_next[x].group.is_trivial()
        }
        objects = BigradedGroup(ambient.bounds, support)
        new_page = Page(objects, tuple(self.rule(r_next)), next_diffs or {})
        self.pages.append(new_page)
        self.cumulative.append(cum_next)
        self._sq.append(sq_next)
        return new_page

    def ensure_page(self, r: int):
        while self.top_r < r:
            self.advance()

    def subquotient_data(self, r: int, x: Position) -> SubquotientData:
        """E^r_x presented as a subquotient of E^{r0}_x."""
        self.ensure_page(r)
        return self._sq[r - self.r0][tuple(x)]

    # -- cycles / boundaries / E-infinity ------------------------------------

    def cycles_boundaries(self, x: Position, r: int):
        """Nested subgroups B^{r0-1} <= ... <= B^r <= Z^r <= ... <= Z^{r0-1}.

        Returns ``(Z_chain, B_chain)`` as lists indexed by page r0-1..r, with
        Z^{r0-1} the full subgroup and B^{r0-1} zero; asserts that each
        Z^s/B^s reproduces E^{s+1}_x.
        """
        if r < self.r0:
            raise ValueError("r must be >= r0")
        self.ensure_page(r + 1)
        x = tuple(x)
        amb = self.pages[0].objects.at(x)
        Zs = [Subgroup.full(amb)]
        Bs = [Subgroup.zero(amb)]
        trivial = (Subgroup.full(amb), Subgroup.zero(amb))
        for s in range(self.r0, r + 1):
            Znew, Bnew = self.cumulative[s - self.r0 + 1].get(x, trivial)
            Zs.append(Znew)
            Bs.append(Bnew)
            assert subquotient(Znew, Bnew).group == self.page(s + 1).objects.at(x)
        for a, b in zip(Zs[1:], Zs[:-1]):
            assert b.contains_subgroup(a)
        for a, b in zip(Bs[:-1], Bs[1:]):
            assert b.contains_subgroup(a)
        assert Zs[-1].contains_subgroup(Bs[-1])
        return Zs, Bs

    def stabilization_horizon(self) -> int:
        """A page index from which no differential can re-enter the bounds.

        For the homological/cohomological rules the bidegree grows linearly,
        so any page past the rectangle diameter is safe.  For explicit rules
        the declared list is exhausted and later differentials are zero by
        convention.
        """
        (pmin, pmax), (qmin, qmax) = self.pages[0].objects.bounds
        diam = max(pmax - pmin, qmax - qmin) + 2
        horizon = max(self.top_r, self.r0 + diam)
        explicit = getattr(self.rule, "explicit_up_to", None)
        if explicit is not None:
            horizon = max(self.top_r, explicit)
        else:
            for r in range(horizon, horizon + diam):
                v = self.rule(r)
                if abs(v[0]) <= pmax - pmin and abs(v[1]) <= qmax - qmin:
                    raise UnboundedSupport(
                        "bidegree rule does not leave the bounds by page %d" % r
                    )
        return horizon

    def e_infinity(self):
        """The limit page with, per position, its stabilization page.

        Returns ``(Einf: BigradedGroup, stab: dict position -> page index,
        data: dict position -> SubquotientData)``.
        """
        H = self.stabilization_horizon()
        self.ensure_page(H + 1)
        ambient = self.pages[0].objects
        support = {}
        stab = {}
        data = {}
        for x in ambient.positions():
            chain = [self.cumulative[i][x] for i in range(len(self.cumulative))]
            last = chain[-1]
            # first page index from which (Z, B) never changes again
            s = self.r0
            for i in range(len(chain) - 1, -1, -1):
                if chain[i] != last:
                    s = self.r0 + i + 1
                    break
            stab[x] = s
            sq = subquotient(last[0], last[1])
            data[x] = sq
            if not sq.group.is_trivial():
                support[x] = sq.group
        return BigradedGroup(ambient.bounds, support), stab, data

    def collapse_page(self) -> Optional[int]:
        """Least page from which all differentials (within bounds) vanish."""
        H = self.stabilization_horizon()
        self.ensure_page(H + 1)
        last_nonzero = self.r0 - 1
        for r in range(self.r0, self.top_r + 1):
            if self.page(r).diffs:
                last_nonzero = r
        return max(self.r0, last_nonzero + 1)


def spectral_sequence_from_page(
    r0: int,
    bounds,
    groups: Dict[Position, FPAbGroup],
    diffs: Dict[Position, Hom],
    rule: Callable[[int], Position],
) -> SpectralSequence:
    objects = BigradedGroup(bounds, groups)
    return SpectralSequence(r0, Page(objects, tuple(rule(r0)), diffs), rule)


class SSMorphism:
    """A morphism of spectral sequences, induced page by page.

    Only the starting-page components are data; every later component is the
    induced map on the anchored subquotients (and its well-definedness is a
    theorem, re-verified here).  Commutation with the stored differentials is
    checked on every materialized page.
    """

    def __init__(self, source: SpectralSequence, target: SpectralSequence,
                 components: Dict[Position, Hom]):
        if source.r0 != target.r0:
            raise NotAMorphism("starting pages differ")
        self.source = source
        self.target = target
        self.components = {}
        amb_s = source.pages[0].objects
        amb_t = target.pages[0].objects
        pos = set(amb_s.positions()) | set(amb_t.positions())
        for x in pos:
            f = components.get(x, Hom.zero_map(amb_s.at(x), amb_t.at(x)))
            if f.domain != amb_s.at(x) or f.codomain != amb_t.at(x):
                raise NotAMorphism(("component endpoints", x))
            self.components[x] = f
        self.verify_page(source.r0)

    def component(self, r: int, x: Position) -> Hom:
        """f^r_x, induced on the anchored subquotients."""
        x = tuple(x)
        self.source.ensure_page(r)
        self.target.ensure_page(r)
        f0 = self.components.get(
            x,
            Hom.zero_map(
                self.source.pages[0].objects.at(x), self.target.pages[0].objects.at(x)
            ),
        )
        sq_s = self._sq(self.source, r, x)
        sq_t = self._sq(self.target, r, x)
        try:
            return induced_map(f0, sq_s, sq_t)
        except NotWellDefined as e:
            raise NotAMorphism(("not well defined on page %d" % r, x, e.args)) from e

    @staticmethod
    def _sq(ss: SpectralSequence, r: int, x: Position) -> SubquotientData:
        ss.ensure_page(r)
        amb = ss.pages[0].objects.at(x)
        cum = ss.cumulative[r - ss.r0]
        if x in cum:
            Z, B = cum[x]
        else:
            Z, B = Subgroup.full(amb), Subgroup.zero(amb)
        return subquotient(Z, B)

    def verify_page(self, r: int):
        """Check the commuting squares f d = d f on page r."""
        self.source.ensure_page(r)
        self.target.ensure_page(r)
        ps, pt = self.source.page(r), self.target.page(r)
        if ps.bidegree != pt.bidegree:
            raise NotAMorphism(("bidegree mismatch on page", r))
        v = ps.bidegree
        pos = set(ps.objects.positions()) | set(pt.objects.positions())
        for x in pos:
            y = (x[0] + v[0], x[1] + v[1])
            lhs = self.component(r, y).compose(ps.d_at(x))
            rhs = pt.d_at(x).compose(self.component(r, x))
            if lhs != rhs:
                raise NotAMorphism(("square", r, x))

    def f_infinity(self) -> Dict[Position, Hom]:
        """The induced map on the limit pages, via restriction to Z-inf/B-inf."""
        _, _, data_s = self.source.e_infinity()
        _, _, data_t = self.target.e_infinity()
        out = {}
        pos = set(data_s) | set(data_t)
        amb_s = self.source.pages[0].objects
        amb_t = self.target.pages[0].objects
        for x in pos:
            f0 = self.components.get(
                x, Hom.zero_map(amb_s.at(x), amb_t.at(x))
            )
            sq_s = data_s.get(x) or subquotient(
                Subgroup.full(amb_s.at(x)), Subgroup.zero(amb_s.at(x))
            )
            sq_t = data_t.get(x) or subquotient(
                Subgroup.full(amb_t.at(x)), Subgroup.zero(amb_t.at(x))
            )
            out[x] = induced_map(f0, sq_s, sq_t)
        return out

    def propagation_report(self, r: int) -> dict:
        """Check the epi/mono/iso propagation clauses from page r to r+1.

        Clause (i): f^r epi at x-v and mono at x  =>  f^{r+1} mono at x.
        Clause (ii): f^r epi at x and mono at x+v  =>  f^{r+1} epi at x.
        Clause (iii): epi at x-v, iso at x, mono at x+v  =>  f^{r+1} iso at x.

        These are theorems; any reported violation is a bug.  The report also
        records that a *componentwise mono* hypothesis alone does not
        propagate (see the search utility below).
        """
        self.source.ensure_page(r + 1)
        self.target.ensure_page(r + 1)
        v = self.source.page(r).bidegree
        verdicts = []
        pos = set(self.source.page(r).objects.positions()) | set(
            self.target.page(r).objects.positions()
        )
        pos |= set(self.source.page(r + 1).objects.positions()) | set(
            self.target.page(r + 1).objects.positions()
        )
        for x in sorted(pos):
            fm = self.component(r, (x[0] - v[0], x[1] - v[1]))
            f = self.component(r, x)
            fp = self.component(r, (x[0] + v[0], x[1] + v[1]))
            nxt = self.component(r + 1, x)
            checks = {}
            if fm.is_epi() and f.is_mono():
                checks["mono"] = nxt.is_mono()
            if f.is_epi() and fp.is_mono():
                checks["epi"] = nxt.is_epi()
            if fm.is_epi() and f.is_iso() and fp.is_mono():
                checks["iso"] = nxt.is_iso()
            verdicts.append((x, checks))
        ok = all(all(c.values()) for _, c in verdicts)
        return {"page": r, "verdicts": verdicts, "ok": ok}

    def iso_propagation(self, r: int) -> bool:
        """If f^r is a positionwise iso, all later pages and f-infinity are too."""
        self.source.ensure_page(r)
        self.target.ensure_page(r)
        pos = set(self.source.page(r).objects.positions()) | set(
            self.target.page(r).objects.positions()
        )
        if not all(self.component(r, x).is_iso() for x in pos):
            return False
        H = max(self.source.stabilization_horizon(), self.target.stabilization_horizon())
        for s in range(r + 1, H + 2):
            self.source.ensure_page(s)
            self.target.ensure_page(s)
            ps = set(self.source.page(s).objects.positions()) | set(
                self.target.page(s).objects.positions()
            )
            assert all(self.component(s, x).is_iso() for x in ps)
        assert all(f.is_iso() for f in self.f_infinity().values())
        return True


def find_mono_nonpropagation(max_order: int = 8):
    """Search for a componentwise-mono f^r whose induced f^{r+1} is not mono.

    Exhausts small cyclic pages: source page 0 -> Z/n (zero differential),
    target page Z/m -d-> Z/m' with d injective enough to kill the target
    homology while the source survives.  Returns the first instance found as
    ``(source_ss, target_ss, morphism, witness_position)``.
    """
    from itertools import product

    bounds = ((0, 1), (0, 0))
    rule = homological_rule  # v_1 = (-1, 0): maps (1,0) -> (0,0)
    for n, m2 in product(range(2, max_order + 1), repeat=2):
        for m1 in range(2, max_order + 1):
            A = FPAbGroup(0, (n,))
            B1 = FPAbGroup(0, (m1,))
            B2 = FPAbGroup(0, (m2,))
            for dval in range(1, m2):
                try:
                    d = Hom(B1, B2, [[dval]])
                except NotWellDefined:
                    continue
                for fval in range(1, m2):
                    try:
                        f = Hom(A, B2, [[fval]])
                    except NotWellDefined:
                        continue
                    if not f.is_mono():
                        continue
                    # source: zero differential into (0,0); target: d
                    src = spectral_sequence_from_page(
                        1, bounds, {(0, 0): A}, {}, rule
                    )
                    tgt = spectral_sequence_from_page(
                        1, bounds, {(0, 0): B2, (1, 0): B1}, {(1, 0): d}, rule
                    )
                    try:
                        m = SSMorphism(src, tgt, {(0, 0): f})
                    except NotAMorphism:
                        continue
                    if not m.component(1, (0, 0)).is_mono():
                        continue
                    nxt = m.component(2, (0, 0))
                    if not nxt.is_mono():
                        return src, tgt, m, (0, 0)
    return None
