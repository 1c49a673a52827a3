"""Shared random generators for the test suite.

Everything is seeded explicitly so failures reproduce.
"""

import random

from specseq.zlinalg import FPAbGroup, Hom, NotWellDefined
from specseq.zdiagrams import Tail, ZDiagram

SMALL_GROUPS = [
    FPAbGroup(),
    FPAbGroup(0, (2,)),
    FPAbGroup(0, (3,)),
    FPAbGroup(0, (4,)),
    FPAbGroup(0, (6,)),
    FPAbGroup(0, (8,)),
    FPAbGroup(0, (2, 4)),
    FPAbGroup(0, (2, 2)),
    FPAbGroup(1),
    FPAbGroup(1, (2,)),
]

FINITE_GROUPS = [G for G in SMALL_GROUPS if G.order() is not None]


def random_hom(G, H, rng, spread=4):
    """A random well-defined hom G -> H (possibly zero)."""
    for _ in range(60):
        m = [
            [rng.randint(-spread, spread) for _ in range(G.ngens)]
            for _ in range(H.ngens)
        ]
        try:
            return Hom(G, H, m)
        except NotWellDefined:
            pass
    return Hom.zero_map(G, H)


def random_diagram(rng, max_width=3, pool=None):
    pool = pool or SMALL_GROUPS
    w = rng.randint(1, max_width)
    gs = [rng.choice(pool) for _ in range(w + 1)]
    maps = [random_hom(gs[i], gs[i + 1], rng) for i in range(w)]
    return ZDiagram.from_maps(
        rng.randint(-2, 2),
        maps,
        left_tail=rng.choice([Tail.ZERO, Tail.CONSTANT]),
        right_tail=rng.choice([Tail.ZERO, Tail.CONSTANT]),
    )


def seeded(seed):
    return random.Random(seed)


COMPLEX_GROUPS = [
    FPAbGroup(),
    FPAbGroup(0, (2,)),
    FPAbGroup(0, (4,)),
    FPAbGroup(0, (3,)),
    FPAbGroup(0, (8,)),
    FPAbGroup(0, (12,)),
    FPAbGroup(0, (2, 4)),
    FPAbGroup(0, (64,)),
    FPAbGroup(1),
    FPAbGroup(1, (2,)),
    FPAbGroup(2),
]


def random_filtered_complex(rng, max_degree=3, stages=None):
    """A random chain complex with a random exhaustive filtration.

    Returns (groups, diffs, filtration) in the shape expected by the
    filtered-complex couple constructor.  Differentials are built
    degree by degree into the kernel of the previous one, and each
    filtration stage is closed under the differential by construction.
    """
    from specseq.zlinalg import Subgroup

    top = rng.randint(1, max_degree)
    groups = {n: rng.choice(COMPLEX_GROUPS) for n in range(top + 1)}
    diffs = {}
    prev_kernel = Subgroup.full(groups[0])
    for n in range(1, top + 1):
        KG, incl = prev_kernel.as_group()
        h = random_hom(groups[n], KG, rng)
        diffs[n] = incl.compose(h)
        prev_kernel = diffs[n].kernel()

    stages = stages or rng.randint(2, 3)
    filtration = {}
    below = {n: Subgroup.zero(groups[n]) for n in groups}
    for p in range(stages):
        level = {}
        if p == stages - 1:
            level = {n: Subgroup.full(groups[n]) for n in groups}
        else:
            for n in sorted(groups, reverse=True):
                gens = [
                    tuple(rng.randint(-3, 3) for _ in range(groups[n].ngens))
                    for _ in range(rng.randint(0, 2))
                ]
                S = below[n].sum(Subgroup.from_generators(groups[n], gens))
                if n + 1 in groups:
                    S = S.sum(diffs[n + 1].image_of_subgroup(level[n + 1]))
                level[n] = S
        filtration[p] = level
        below = level
    return groups, diffs, filtration
