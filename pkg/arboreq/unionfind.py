"""Disjoint-set forest with undo support.

Union by size without path compression, so every union is a single parent
write that can be undone from a trail.  Used to detect cycles inside color
classes: adding an edge whose endpoints already share a root closes a cycle.

"""


class UnionFind:
    def __init__(self, n: int):
        self._parent = list(range(n))
        self._size = [1] * n
        self._trail: list[tuple[int, int]] = []

    def __len__(self) -> int:
        return len(self._parent)

    def find(self, a: int) -> int:
        parent = self._parent
        while parent[a] != a:
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of `a` and `b`.

        Returns `False` (and changes nothing) when they already share a set,
        i.e. when the edge `ab` would close a cycle.

        """
        root_a, root_b = self.find(a), self.find(b)
        if root_a == root_b:
            return False
        if self._size[root_a] < self._size[root_b]:
            root_a, root_b = root_b, root_a
        self._parent[root_b] = root_a
        self._size[root_a] += self._size[root_b]
        self._trail.append((root_b, root_a))
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def mark(self) -> int:
        """Current trail position, to be passed to `rollback`."""
        return len(self._trail)

    def rollback(self, mark: int):
        """Undo every union performed after `mark`."""
        trail = self._trail
        while len(trail) > mark:
            child, root = trail.pop()
            self._parent[child] = child
            self._size[root] -= self._size[child]
