"""Tests for the integer linear algebra and abelian group layer.

The normal form routines are checked against independent oracles:
brute-force enumeration for small finite groups, Bareiss determinants for
unimodularity, and random unimodular recombinations for canonicality of the
Hermite basis.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specseq.zlinalg import (
    AmbientMismatch,
    ContainmentViolation,
    FPAbGroup,
    Hom,
    NotWellDefined,
    Subgroup,
    cokernel,
    columns_of,
    direct_sum,
    group_from_presentation,
    hermite_column_form,
    hom_kit,
    identity_matrix,
    induced_map,
    kernel_basis,
    mat_mul,
    mat_vec,
    quotient_group,
    smith_normal_form,
    solve_matrix,
    subquotient,
)
from specseq.zlinalg import _snf_with_inverses


def bareiss_det(M):
    """Fraction-free determinant, used as an independent unimodularity oracle."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-30, 30), min_size=c, max_size=c),
            min_size=r,
            max_size=r,
        )
    )
)


class TestSmithNormalForm:
    @given(small_matrices)
    @settings(max_examples=150, deadline=None)
    def test_transform_witnesses(self, M):
        U, D, V = smith_normal_form(M)
        assert mat_mul(mat_mul(U, M), V) == D
        assert abs(bareiss_det(U)) == 1
        assert abs(bareiss_det(V)) == 1

    @given(small_matrices)
    @settings(max_examples=150, deadline=None)
    def test_diagonal_divisibility_chain(self, M):
        _, D, _ = smith_normal_form(M)
        r, c = len(D), len(D[0])
        for i in range(r):
            for j in range(c):
                if i != j:
                    assert D[i][j] == 0
        diag = [D[i][i] for i in range(min(r, c))]
        for a, b in zip(diag, diag[1:]):
            assert a >= 0 and b >= 0
            if a:
                assert b % a == 0
            else:
                assert b == 0

    @given(small_matrices)
    @settings(max_examples=100, deadline=None)
    def test_tracked_inverses(self, M):
        U, _, V, Uinv, Vinv = _snf_with_inverses(M)
        assert mat_mul(Uinv, U) == identity_matrix(len(M))
        assert mat_mul(V, Vinv) == identity_matrix(len(M[0]))

    def test_known_diagonal(self):
        # gcd of all entries 2, second determinant divisor 8 => diag (2, 4).
        _, D, _ = smith_normal_form([[2, 4], [6, 8]])
        assert [D[0][0], D[1][1]] == [2, 4]

    def test_stays_exact_on_huge_entries(self):
        big = 10**40
        U, D, V = smith_normal_form([[big, 1], [0, big]])
        assert mat_mul(mat_mul(U, [[big, 1], [0, big]]), V) == D
        assert D[0][0] == 1 and D[1][1] == big * big


class TestHermiteForm:
    def test_canonical_under_recombination(self):
        rng = random.Random(7)
        for _ in range(150):
            n = rng.randint(1, 4)
            k = rng.randint(0, 4)
            cols = [tuple(rng.randint(-9, 9) for _ in range(n)) for _ in range(k)]
            H1 = hermite_column_form(cols, n)
            cols2 = [list(c) for c in cols]
            for _ in range(6):
                if len(cols2) >= 2:
                    i, j = rng.sample(range(len(cols2)), 2)
                    q = rng.randint(-3, 3)
                    cols2[i] = [a + q * b for a, b in zip(cols2[i], cols2[j])]
            rng.shuffle(cols2)
            cols2.append([0] * n)
            assert hermite_column_form(cols2, n) == H1

    def test_pivot_shape(self):
        H = hermite_column_form([(4, 6), (0, 2)], 2)
        # pivot rows strictly increase, pivots positive, above-pivot zero
        pivots = []
        for col in H:
            nz = [i for i, x in enumerate(col) if x]
            assert col[nz[0]] > 0
            pivots.append(nz[0])
        assert pivots == sorted(set(pivots))


class TestKernelAndSolve:
    @given(small_matrices)
    @settings(max_examples=100, deadline=None)
    def test_kernel_columns_annihilate(self, M):
        for col in kernel_basis(M):
            assert all(v == 0 for v in mat_vec(M, col))

    @given(small_matrices, st.lists(st.integers(-5, 5), min_size=1, max_size=4))
    @settings(max_examples=100, deadline=None)
    def test_solve_roundtrip(self, M, x):
        x = (x * 4)[: len(M[0])]
        y = mat_vec(M, x)
        sol = solve_matrix(M, y)
        assert sol is not None
        assert mat_vec(M, sol) == y

    def test_no_rational_solutions_accepted(self):
        assert solve_matrix([[2]], (1,)) is None


class TestFPAbGroup:
    def test_canonical_form_constraints(self):
        with pytest.raises(ValueError):
            FPAbGroup(0, (3, 2))
        with pytest.raises(ValueError):
            FPAbGroup(0, (1,))
        with pytest.raises(ValueError):
            FPAbGroup(-1)

    def test_presentation_oracle(self):
        G, _, _ = group_from_presentation(2, [(2, 0), (0, 4)])
        assert G == FPAbGroup(0, (2, 4))
        G, _, _ = group_from_presentation(2, [(2, 2), (0, 4)])
        assert G == FPAbGroup(0, (2, 4))
        G, _, _ = group_from_presentation(3, [(2, 0, 0)])
        assert G == FPAbGroup(2, (2,))
        G, _, _ = group_from_presentation(2, [(1, 0)])
        assert G == FPAbGroup(1)

    def test_presentation_proj_sect_roundtrip(self):
        rng = random.Random(3)
        for _ in range(80):
            n = rng.randint(0, 4)
            k = rng.randint(0, 4)
            rel = [tuple(rng.randint(-6, 6) for _ in range(n)) for _ in range(k)]
            G, proj, sect = group_from_presentation(n, rel)
            ps = mat_mul(proj, sect)
            for j in range(G.ngens):
                col = G.reduce(tuple(ps[i][j] for i in range(G.ngens)))
                assert col == tuple(1 if i == j else 0 for i in range(G.ngens))
            for rc in rel:
                assert G.reduce(mat_vec(proj, rc)) == G.zero()

    def test_order_and_describe(self):
        G = FPAbGroup(1, (2, 6))
        assert G.order() is None
        assert FPAbGroup(0, (2, 6)).order() == 12
        assert G.describe() == "Z (+) Z/2 (+) Z/6"
        assert FPAbGroup().describe() == "0"


def brute_generated(G, gens):
    S = {G.zero()}
    frontier = list(gens)
    while frontier:
        x = frontier.pop()
        for s in list(S):
            y = G.add(s, x)
            if y not in S:
                S.add(y)
                frontier.append(y)
    return S


class TestSubgroups:
    def test_membership_matches_enumeration(self):
        rng = random.Random(11)
        for _ in range(40):
            G = FPAbGroup(0, rng.choice([(2,), (4,), (2, 4), (2, 2), (6,), (2, 12)]))
            elts = list(G.elements())
            gens = [rng.choice(elts) for _ in range(2)]
            S = Subgroup.from_generators(G, gens)
            B = brute_generated(G, gens)
            assert all(S.contains(e) == (e in B) for e in elts)

    def test_sum_and_intersection_against_enumeration(self):
        rng = random.Random(12)
        for _ in range(40):
            G = FPAbGroup(0, rng.choice([(4,), (2, 4), (6,), (2, 12)]))
            elts = list(G.elements())
            g1 = [rng.choice(elts) for _ in range(2)]
            g2 = [rng.choice(elts) for _ in range(2)]
            S1 = Subgroup.from_generators(G, g1)
            S2 = Subgroup.from_generators(G, g2)
            B1, B2 = brute_generated(G, g1), brute_generated(G, g2)
            SS, II = S1.sum(S2), S1.intersection(S2)
            Bsum = brute_generated(G, list(B1 | B2))
            for e in elts:
                assert SS.contains(e) == (e in Bsum)
                assert II.contains(e) == (e in (B1 & B2))

    def test_equality_is_canonical(self):
        G = FPAbGroup(0, (12,))
        assert Subgroup.from_generators(G, [(4,)]) == Subgroup.from_generators(
            G, [(8,), (12,)]
        )
        assert Subgroup.from_generators(G, [(4,)]) != Subgroup.from_generators(G, [(2,)])

    def test_ambient_mismatch_rejected(self):
        S1 = Subgroup.zero(FPAbGroup(0, (4,)))
        S2 = Subgroup.zero(FPAbGroup(0, (8,)))
        with pytest.raises(AmbientMismatch):
            S1.sum(S2)
        with pytest.raises(AmbientMismatch):
            S1.intersection(S2)

    def test_as_group_inclusion(self):
        G = FPAbGroup(1, (4,))
        S = Subgroup.from_generators(G, [(2, 0), (0, 2)])
        SG, incl = S.as_group()
        assert SG == FPAbGroup(1, (2,))
        for j in range(SG.ngens):
            e = tuple(1 if i == j else 0 for i in range(SG.ngens))
            assert S.contains(incl(e))


class TestHom:
    def test_relation_compatibility_enforced(self):
        Z2 = FPAbGroup(0, (2,))
        Z4 = FPAbGroup(0, (4,))
        with pytest.raises(NotWellDefined):
            Hom(Z2, Z4, [[1]])  # 2*1 != 0 in Z/4
        Hom(Z2, Z4, [[2]])  # doubling is fine
        Hom(Z4, Z2, [[1]])  # reduction is fine

    def test_kernel_image_cokernel_against_enumeration(self):
        rng = random.Random(13)
        for _ in range(50):
            G = FPAbGroup(0, rng.choice([(4,), (2, 4), (6,), (8,), (2, 2)]))
            H = FPAbGroup(0, rng.choice([(4,), (2, 4), (6,), (8,), (2, 2)]))
            f = None
            while f is None:
                try:
                    f = Hom(
                        G,
                        H,
                        [
                            [rng.randint(-8, 8) for _ in range(G.ngens)]
                            for _ in range(H.ngens)
                        ],
                    )
                except NotWellDefined:
                    pass
            kit = hom_kit(f)
            kelts = {e for e in G.elements() if f(e) == H.zero()}
            ielts = {f(e) for e in G.elements()}
            assert kit["kernel"].as_group()[0].order() == len(kelts)
            assert kit["image"].as_group()[0].order() == len(ielts)
            assert kit["cokernel"].order() == H.order() // len(ielts)
            assert kit["cokernel_projection"].kernel() == kit["image"]

    def test_solve_element(self):
        f = Hom(FPAbGroup(1), FPAbGroup(0, (6,)), [[2]])
        assert f.solve_element((4,)) is not None
        assert f(f.solve_element((4,))) == (4,)
        assert f.solve_element((1,)) is None

    def test_preimage(self):
        # multiplication by 2 on Z/8; preimage of <4> is <2>
        G = FPAbGroup(0, (8,))
        f = Hom(G, G, [[2]])
        S = Subgroup.from_generators(G, [(4,)])
        assert f.preimage(S) == Subgroup.from_generators(G, [(2,)])

    def test_mono_epi_iso(self):
        Z = FPAbGroup(1)
        assert Hom(Z, Z, [[2]]).is_mono()
        assert not Hom(Z, Z, [[2]]).is_epi()
        assert Hom(Z, Z, [[-1]]).is_iso()
        Z6 = FPAbGroup(0, (6,))
        assert Hom(Z6, Z6, [[5]]).is_iso()


class TestSubquotient:
    def test_orders_multiply(self):
        rng = random.Random(17)
        for _ in range(40):
            G = FPAbGroup(0, rng.choice([(4,), (2, 4), (8,), (2, 2, 2), (12,)]))
            elts = list(G.elements())
            Z = Subgroup.from_generators(G, [rng.choice(elts) for _ in range(2)])
            B = Subgroup.from_generators(
                G, [c for c in Z.basis if rng.random() < 0.5]
            )
            sq = subquotient(Z, B)
            assert (
                sq.group.order() * B.as_group()[0].order()
                == Z.as_group()[0].order()
            )
            for q in sq.group.elements():
                assert sq.project(sq.lift(q)) == q
            for c in B.basis:
                assert sq.project(c) == sq.group.zero()

    def test_containment_violation(self):
        G = FPAbGroup(0, (8,))
        Z = Subgroup.from_generators(G, [(4,)])
        B = Subgroup.from_generators(G, [(2,)])
        with pytest.raises(ContainmentViolation):
            subquotient(Z, B)

    def test_quotient_group(self):
        G = FPAbGroup(1)
        Q, proj = quotient_group(G, Subgroup.from_generators(G, [(6,)]))
        assert Q == FPAbGroup(0, (6,))
        assert proj.is_epi()

    def test_induced_map_well_definedness(self):
        G = FPAbGroup(0, (12,))
        Z = Subgroup.from_generators(G, [(2,)])
        B = Subgroup.from_generators(G, [(6,)])
        sq = subquotient(Z, B)
        assert sq.group == FPAbGroup(0, (3,))
        assert induced_map(Hom.identity(G), sq, sq).is_iso()
        # tripling kills the quotient Z/3
        tripled = induced_map(Hom(G, G, [[3]]), sq, sq)
        assert tripled.is_zero()

    def test_induced_map_rejects_leaky_maps(self):
        G = FPAbGroup(0, (4,))
        top = subquotient(Subgroup.full(G), Subgroup.zero(G))
        small = subquotient(
            Subgroup.from_generators(G, [(2,)]), Subgroup.zero(G)
        )
        with pytest.raises(NotWellDefined):
            induced_map(Hom.identity(G), top, small)


class TestDirectSum:
    def test_invariant_factors_merge(self):
        G, incs, projs = direct_sum([FPAbGroup(1, (2,)), FPAbGroup(0, (4,))])
        assert G == FPAbGroup(1, (2, 4))
        for inc, prj in zip(incs, projs):
            assert prj.compose(inc) == Hom.identity(inc.domain)

    def test_empty_sum(self):
        G, incs, projs = direct_sum([])
        assert G == FPAbGroup()
        assert incs == [] and projs == []
