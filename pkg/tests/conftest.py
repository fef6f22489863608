"""Shared fixtures: toy graphs, random graph generators, and a stub
similarity model with injectable pair values."""

from __future__ import annotations

import random

import pytest

from factflow import LabeledClaim, build_model, generate_lcwa_negatives, load_graph

# Small five-node graph used across modules: four relations A..D, five
# entities a..e, one relation (A) appearing twice.
TOY_LINES = [
    "a\tA\tb",
    "b\tB\tc",
    "c\tC\td",
    "d\tA\te",
    "b\tD\td",
]


@pytest.fixture
def toy_graph():
    return load_graph(list(TOY_LINES))


@pytest.fixture
def toy_model(toy_graph):
    return build_model(toy_graph)


class StubModel:
    """Similarity lookup with hand-set values (defaults to 0)."""

    def __init__(self, pairs, default=0.0):
        self.pairs = dict(pairs)
        self.default = default

    def similarity(self, r_i, r_j):
        key = (r_i, r_j) if r_i <= r_j else (r_j, r_i)
        return self.pairs.get(key, self.default)


def random_multigraph_lines(rng: random.Random, num_nodes, num_edges, num_rels):
    """Connected random multigraph as TSV lines (spanning tree + extras).

    The edge count is capped by the number of distinct (a, r, b) triples.
    """
    assert num_edges >= num_nodes - 1
    num_edges = min(num_edges, num_nodes * (num_nodes - 1) * num_rels)
    lines = []
    seen = set()

    def emit(a, b):
        r = rng.randrange(num_rels)
        key = (f"n{a}", f"r{r}", f"n{b}")
        if key in seen:  # duplicates collapse at load; keep edge count exact
            return False
        seen.add(key)
        lines.append("\t".join(key))
        return True

    for v in range(1, num_nodes):
        emit(rng.randrange(v), v)
    while len(lines) < num_edges:
        a, b = rng.sample(range(num_nodes), 2)
        emit(a, b)
    return lines


def random_graph(rng: random.Random, max_nodes=10, max_edges=14, max_rels=4):
    n = rng.randint(2, max_nodes)
    e = rng.randint(n - 1, max_edges)
    r = rng.randint(1, max_rels)
    return load_graph(random_multigraph_lines(rng, n, e, r))


def random_stub_model(rng: random.Random, num_rels, zero_fraction=0.2):
    pairs = {}
    for i in range(num_rels):
        for j in range(i, num_rels):
            if rng.random() < zero_fraction:
                pairs[(i, j)] = 0.0
            else:
                pairs[(i, j)] = rng.uniform(0.05, 1.0)
    return StubModel(pairs)


# -- scaled-down end-to-end fixture ------------------------------------
#
# Twenty households (partners x, y and a shared child), two firms that
# employ the x-side, two towns split by household parity. Spouse claims
# are provable through the shared child; wrong-partner claims can lean
# only on shared towns or firms.

N_FAMILIES = 20


def family_graph_lines():
    lines = []
    for i in range(N_FAMILIES):
        x, y, kid = f"x{i}", f"y{i}", f"kid{i}"
        firm = f"firm{i % 2}"
        town = f"town{i % 2}"
        lines.append(f"{x}\tspouse\t{y}")
        lines.append(f"{x}\tchild\t{kid}")
        lines.append(f"{y}\tchild\t{kid}")
        lines.append(f"{x}\temployer\t{firm}")
        lines.append(f"{x}\tlives_in\t{town}")
        lines.append(f"{y}\tlives_in\t{town}")
    # one household with a second child, so the shared-child pattern
    # outnumbers every other discriminative pattern
    lines.append("x0\tchild\tkid20")
    lines.append("y0\tchild\tkid20")
    lines.append("firm0\theadquarters\ttown0")
    lines.append("firm1\theadquarters\ttown1")
    return lines


@pytest.fixture(scope="session")
def family_graph():
    return load_graph(family_graph_lines())


@pytest.fixture(scope="session")
def family_model(family_graph):
    return build_model(family_graph)


@pytest.fixture(scope="session")
def family_dataset(family_graph):
    """20 true spouse claims plus 20 closed-world negatives."""
    g = family_graph
    true_claims = [
        LabeledClaim(g.claim(f"x{i}", "spouse", f"y{i}"), True)
        for i in range(N_FAMILIES)
    ]
    negatives = generate_lcwa_negatives(true_claims, 1, rng_seed=7)
    assert len(negatives) == N_FAMILIES
    return true_claims + negatives
