"""Stallings folded graphs of finitely generated subgroups of free groups."""

from collections import defaultdict
from typing import Iterator, Sequence

from pingcert.services.words import Word, reduce_letters


class FoldedGraph:
    """Folded core graph with base vertex 0.

    A reduced word lies in the subgroup iff it reads a closed path at the
    base. Reading a reduced word greedily also names its right coset: the
    unread suffix continues into a tree of the Schreier graph and never
    comes back.
    """

    def __init__(self, generators: Sequence[Word]):
        edges: set[tuple[int, int, int]] = set()
        count = 1
        for g in generators:
            letters = reduce_letters(g.letters)
            if not letters:
                continue
            prev = 0
            for i, c in enumerate(letters):
                nxt = 0 if i == len(letters) - 1 else count
                if nxt:
                    count += 1
                edges.add(_oriented(prev, c, nxt))
                prev = nxt
        edges = _fold(edges)
        vertices = sorted({0} | {u for u, _, _ in edges} | {v for _, _, v in edges})
        relabel = {v: i for i, v in enumerate(vertices)}
        self.adjacency: list[dict[int, int]] = [dict() for _ in vertices]
        for u, c, v in edges:
            self.adjacency[relabel[u]][c] = relabel[v]
            self.adjacency[relabel[v]][-c] = relabel[u]

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    def read(self, letters: Sequence[int]) -> tuple[int, int]:
        """(vertex reached, number of letters consumed) reading from the base."""
        v = 0
        for i, c in enumerate(letters):
            nxt = self.adjacency[v].get(c)
            if nxt is None:
                return v, i
            v = nxt
        return v, len(letters)

    def accepts(self, letters: Sequence[int]) -> bool:
        letters = reduce_letters(letters)
        v, consumed = self.read(letters)
        return consumed == len(letters) and v == 0

    def coset_key(self, letters: Sequence[int]) -> tuple[int, tuple[int, ...]]:
        letters = reduce_letters(letters)
        v, consumed = self.read(letters)
        return v, tuple(letters[consumed:])

    def closed_reduced_paths(self, max_length: int) -> Iterator[tuple[int, ...]]:
        """Reduced labels of closed paths at the base, i.e. the subgroup
        elements of free length 1..max_length, in shortlex-compatible DFS."""
        stack: list[tuple[int, tuple[int, ...]]] = [(0, ())]
        while stack:
            v, letters = stack.pop()
            if letters and v == 0:
                yield letters
            if len(letters) == max_length:
                continue
            for c in sorted(self.adjacency[v], key=lambda x: (abs(x), x < 0), reverse=True):
                if letters and letters[-1] == -c:
                    continue
                stack.append((self.adjacency[v][c], letters + (c,)))


def _oriented(u: int, c: int, v: int) -> tuple[int, int, int]:
    return (u, c, v) if c > 0 else (v, -c, u)


def _fold(edges: set[tuple[int, int, int]]) -> set[tuple[int, int, int]]:
    while True:
        out: dict[tuple[int, int], set[int]] = defaultdict(set)
        for u, c, v in edges:
            out[(u, c)].add(v)
            out[(v, -c)].add(u)
        clash = next((targets for targets in out.values() if len(targets) > 1), None)
        if clash is None:
            return edges
        keep, *drop = sorted(clash)
        merged = set()
        for u, c, v in edges:
            u = keep if u in drop else u
            v = keep if v in drop else v
            merged.add((u, c, v))
        edges = merged
