"""Permutations of sheets 1..d in one-line notation: sigma[i - 1] is the image of i."""

import re
from typing import Sequence

import networkx as nx

Permutation = tuple[int, ...]

_CYCLE = re.compile(r"\(([^()]*)\)")


def identity(degree: int) -> Permutation:
    return tuple(range(1, degree + 1))


def is_permutation(sigma: Sequence[int], degree: int) -> bool:
    return sorted(sigma) == list(range(1, degree + 1))


def parse_permutation(text: str, degree: int) -> Permutation:
    """
    Reads one-line notation "2,1,3" or cycle notation "(1 2)(3 4)".
    The identity may be written "()" or "id".
    """
    text = text.strip()
    if text in ("", "id", "()"):
        return identity(degree)
    if text.startswith("("):
        if _CYCLE.sub("", text).strip():
            raise ValueError(f"malformed cycle notation: {text!r}")
        sigma = list(identity(degree))
        seen: set[int] = set()
        for body in _CYCLE.findall(text):
            cycle = [int(token) for token in re.split(r"[\s,]+", body.strip()) if token]
            if any(i < 1 or i > degree for i in cycle) or seen & set(cycle) or len(set(cycle)) != len(cycle):
                raise ValueError(f"cycle ({body}) is not a valid cycle on 1..{degree}")
            seen.update(cycle)
            for i, j in zip(cycle, cycle[1:] + cycle[:1]):
                sigma[i - 1] = j
        return tuple(sigma)
    sigma = tuple(int(token) for token in re.split(r"[\s,]+", text) if token)
    if not is_permutation(sigma, degree):
        raise ValueError(f"{text!r} is not a permutation of 1..{degree}")
    return sigma


def compose(first: Permutation, second: Permutation) -> Permutation:
    """Apply `first`, then `second`."""
    return tuple(second[i - 1] for i in first)


def inverse(sigma: Permutation) -> Permutation:
    result = [0] * len(sigma)
    for i, image in enumerate(sigma, start=1):
        result[image - 1] = i
    return tuple(result)


def commutator(x: Permutation, y: Permutation) -> Permutation:
    """x y x^-1 y^-1, letters applied left to right."""
    product = x
    for factor in (y, inverse(x), inverse(y)):
        product = compose(product, factor)
    return product


def cycles(sigma: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles, each starting at its smallest element, fixed points included."""
    seen: set[int] = set()
    result = []
    for start in range(1, len(sigma) + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        current = sigma[start - 1]
        while current != start:
            cycle.append(current)
            seen.add(current)
            current = sigma[current - 1]
        result.append(tuple(cycle))
    return result


def cycle_type(sigma: Permutation) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(sigma)), reverse=True))


def format_cycles(sigma: Permutation) -> str:
    moved = [c for c in cycles(sigma) if len(c) > 1]
    if not moved:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in moved)


def schreier_graph(generators: dict[str, Permutation]) -> nx.MultiDiGraph:
    """Action graph: an edge i -> sigma(i) labelled by the generator name."""
    degree = len(next(iter(generators.values())))
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(range(1, degree + 1))
    for label, sigma in generators.items():
        graph.add_edges_from(((i, sigma[i - 1]) for i in range(1, degree + 1)), label=label)
    return graph


def is_transitive(generators: Sequence[Permutation]) -> bool:
    degree = len(generators[0])
    graph = nx.Graph()
    graph.add_nodes_from(range(1, degree + 1))
    for sigma in generators:
        graph.add_edges_from((i, sigma[i - 1]) for i in range(1, degree + 1))
    return nx.is_connected(graph)
