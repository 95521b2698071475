class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def groups(self, members=None) -> list[list[int]]:
        """Classes as sorted lists, ordered by their smallest element."""
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)) if members is None else sorted(members):
            out.setdefault(self.find(x), []).append(x)
        return sorted(out.values())
