"""Permutations and permutation groups acting on {0, ..., n-1}.

Groups carry a deterministic Schreier-Sims stabilizer chain: base points are
chosen in the fixed order 0, 1, 2, ... and orbits are extended breadth-first
with generators applied in declaration order, so orders, transversals and
derived subgroups are reproducible across runs and thread counts.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ConsistencyError, InvalidPermutationError, ResourceLimitError

MAX_DEGREE = 1 << 16


class Permutation:
    """A permutation stored as the tuple of images of 0..n-1.

    Composition is left to right: (p * q)(x) == q(p(x)), matching the
    exponent convention x^(pq) = (x^p)^q.
    """

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int], _trusted: bool = False):
        imgs = tuple(images)
        if not _trusted:
            n = len(imgs)
            if n > MAX_DEGREE:
                raise InvalidPermutationError(f"degree {n} exceeds {MAX_DEGREE}")
            seen = [False] * n
            for x in imgs:
                if not isinstance(x, int) or not 0 <= x < n or seen[x]:
                    raise InvalidPermutationError(f"images are not a bijection of 0..{n - 1}")
                seen[x] = True
        self.images = imgs

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(range(n), _trusted=True)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(self.images) != len(other.images):
            raise InvalidPermutationError("degree mismatch in composition")
        o = other.images
        return Permutation((o[x] for x in self.images), _trusted=True)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(inv, _trusted=True)

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(len(self.images))
        square = self
        while n:
            if n & 1:
                result = result * square
            square = square * square
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return all(y == x for x, y in enumerate(self.images))

    def order(self) -> int:
        result = 1
        for c in self.cycles(include_fixed=False):
            result = result * len(c) // math.gcd(result, len(c))
        return result

    def act_on_set(self, points: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[x] for x in points)

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """Disjoint cycle decomposition, each cycle led by its smallest point."""
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(x for x, y in enumerate(self.images) if x == y)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return f"Permutation.identity({len(self.images)})"
        body = "".join("(" + " ".join(str(x) for x in c) + ")" for c in cyc)
        return f"Permutation[{body}]"


class TransitivityDegree(NamedTuple):
    """Result of a transitivity computation.

    value is the exact degree when capped is False; when capped is True the
    group is at least `value`-transitive and the search stopped at the cap.
    """

    value: int
    capped: bool


class _ChainLevel:
    """One level of a stabilizer chain: a base point, its orbit transversal
    under the level generators, in deterministic BFS order."""

    __slots__ = ("point", "gens", "transversal", "orbit_order")

    def __init__(self, point: int, gens: list[Permutation], degree: int):
        self.point = point
        self.gens = gens
        self.recompute(degree)

    def recompute(self, degree: int) -> None:
        trans = {self.point: Permutation.identity(degree)}
        order = [self.point]
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            ux = trans[x]
            for s in self.gens:
                y = s.images[x]
                if y not in trans:
                    trans[y] = ux * s
                    order.append(y)
        self.transversal = trans
        self.orbit_order = order


class PermGroup:
    """A permutation group given by generators, with a lazy deterministic
    Schreier-Sims chain for order, membership and stabilizers."""

    def __init__(self, generators: Sequence[Permutation], degree: int | None = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise InvalidPermutationError("degree required for a trivial group")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise InvalidPermutationError(
                    f"generator degree {g.degree} does not match group degree {degree}"
                )
        self._degree = degree
        self.generators = tuple(g for g in gens if not g.is_identity())
        self._chain: list[_ChainLevel] | None = None
        self._order: int | None = None

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self._degree)

    # -- stabilizer chain ---------------------------------------------------

    def _build_chain(self, base_prefix: Sequence[int] = ()) -> list[_ChainLevel]:
        """Deterministic Schreier-Sims. Base points come from base_prefix
        first, then smallest moved points in increasing order."""
        degree = self._degree
        gens = list(self.generators)
        base: list[int] = list(base_prefix)
        if not gens:
            return [_ChainLevel(b, [], degree) for b in base]

        def first_moved(g: Permutation) -> int:
            for x in range(degree):
                if g.images[x] != x:
                    return x
            raise ConsistencyError("identity slipped into strong generators")

        for g in gens:
            if all(g.images[b] == b for b in base):
                base.append(first_moved(g))
        levels = [
            _ChainLevel(base[i], [g for g in gens if all(g.images[b] == b for b in base[:i])], degree)
            for i in range(len(base))
        ]

        def strip(g: Permutation, start: int) -> tuple[Permutation, int]:
            for l in range(start, len(levels)):
                delta = g.images[levels[l].point]
                if delta not in levels[l].transversal:
                    return g, l
                g = g * levels[l].transversal[delta].inverse()
            return g, len(levels)

        i = len(levels) - 1
        while i >= 0:
            levels[i].recompute(degree)
            restart = False
            for x in levels[i].orbit_order:
                ux = levels[i].transversal[x]
                for s in levels[i].gens:
                    y = s.images[x]
                    schreier = ux * s * levels[i].transversal[y].inverse()
                    if schreier.is_identity():
                        continue
                    residue, j = strip(schreier, i + 1)
                    if residue.is_identity():
                        continue
                    if j == len(levels):
                        base.append(first_moved(residue))
                        levels.append(_ChainLevel(base[-1], [], degree))
                    for l in range(i + 1, j + 1):
                        levels[l].gens.append(residue)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1
        return levels

    def _get_chain(self) -> list[_ChainLevel]:
        if self._chain is None:
            self._chain = self._build_chain()
        return self._chain

    def order(self) -> int:
        if self._order is None:
            result = 1
            for level in self._get_chain():
                result *= len(level.transversal)
            self._order = result
        return self._order

    def _strip_full(self, g: Permutation, chain: list[_ChainLevel]) -> Permutation:
        for level in chain:
            delta = g.images[level.point]
            if delta not in level.transversal:
                return g
            g = g * level.transversal[delta].inverse()
        return g

    def __contains__(self, g: Permutation) -> bool:
        if g.degree != self._degree:
            return False
        return self._strip_full(g, self._get_chain()).is_identity()

    def is_subgroup(self, other: "PermGroup") -> bool:
        """True when every generator of self lies in other."""
        return all(g in other for g in self.generators) and self._degree == other._degree

    # -- orbits and stabilizers ---------------------------------------------

    def point_orbit(self, alpha: int) -> tuple[int, ...]:
        """Orbit of a point, sorted ascending."""
        self._check_point(alpha)
        seen = {alpha}
        queue = [alpha]
        i = 0
        while i < len(queue):
            x = queue[i]
            i += 1
            for g in self.generators:
                y = g.images[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))

    def orbits(self) -> list[tuple[int, ...]]:
        """All point orbits, each sorted, ordered by smallest element."""
        remaining = set(range(self._degree))
        out = []
        while remaining:
            orb = self.point_orbit(min(remaining))
            out.append(orb)
            remaining.difference_update(orb)
        return out

    def is_transitive(self) -> bool:
        return self._degree > 0 and len(self.point_orbit(0)) == self._degree

    def point_stabilizer(self, alpha: int) -> "PermGroup":
        """Stabilizer of a point, via a chain rebuilt with alpha first."""
        self._check_point(alpha)
        chain = self._build_chain(base_prefix=[alpha])
        gens = chain[1].gens if len(chain) > 1 else []
        stab = PermGroup(_dedupe(gens), self._degree)
        if self.order() % max(stab.order(), 1) != 0:
            raise ConsistencyError("stabilizer order does not divide group order")
        return stab

    def transversal_to(self, alpha: int, beta: int) -> Permutation | None:
        """Some element mapping alpha to beta, or None when in different orbits."""
        self._check_point(alpha)
        self._check_point(beta)
        trans = {alpha: self.identity}
        queue = [alpha]
        i = 0
        while i < len(queue):
            x = queue[i]
            i += 1
            for g in self.generators:
                y = g.images[x]
                if y not in trans:
                    trans[y] = trans[x] * g
                    queue.append(y)
        return trans.get(beta)

    def transitivity_degree(self, cap: int = 6) -> TransitivityDegree:
        """Largest t <= cap such that the action is t-transitive.

        Uses the recursion: G is t-transitive iff G is transitive and a point
        stabilizer is (t-1)-transitive on the remaining points.
        """
        group: PermGroup = self
        fixed: list[int] = []
        t = 0
        while t < cap:
            remaining = self._degree - len(fixed)
            if remaining <= 0:
                return TransitivityDegree(t, False)
            alpha = next(x for x in range(self._degree) if x not in fixed)
            if len(group.point_orbit(alpha)) != remaining:
                return TransitivityDegree(t, False)
            t += 1
            fixed.append(alpha)
            if t < cap:
                group = group.point_stabilizer(alpha)
        return TransitivityDegree(cap, True)

    def is_primitive(self) -> bool:
        """Transitive with no nontrivial block system.

        Runs the minimal-block closure from each pair {0, beta}, with beta
        ranging over representatives of the point-stabilizer orbits.
        """
        if self._degree == 1:
            return True
        if not self.is_transitive():
            return False
        stab = self.point_stabilizer(0)
        reps = [orb[0] for orb in stab.orbits() if orb != (0,)]
        for beta in reps:
            if beta == 0:
                continue
            if self._minimal_block_size(0, beta) != self._degree:
                return False
        return True

    def _minimal_block_size(self, alpha: int, beta: int) -> int:
        """Size of the minimal block containing {alpha, beta} (union-find)."""
        images = [g.images for g in self.generators]
        return minimal_block_size(images, self._degree, alpha, beta)

    # -- element access -----------------------------------------------------

    def random_element(self, rng) -> Permutation:
        """Uniformly random element: product of random transversal reps."""
        g = self.identity
        for level in self._get_chain():
            x = rng.choice(level.orbit_order)
            g = level.transversal[x] * g
        return g

    def elements(self, limit: int = 10**6) -> Iterator[Permutation]:
        """All elements by depth-first transversal products; guarded by limit."""
        if self.order() > limit:
            raise ResourceLimitError("element enumeration", limit, self.order())
        chain = self._get_chain()

        def rec(i: int, acc: Permutation) -> Iterator[Permutation]:
            if i == len(chain):
                yield acc
                return
            for x in chain[i].orbit_order:
                yield from rec(i + 1, chain[i].transversal[x] * acc)

        yield from rec(0, self.identity)

    def conjugate(self, by: Permutation) -> "PermGroup":
        """The group by^-1 * self * by on the same points."""
        inv = by.inverse()
        return PermGroup([inv * g * by for g in self.generators], self._degree)

    def _check_point(self, alpha: int) -> None:
        if not 0 <= alpha < self._degree:
            raise InvalidPermutationError(f"point {alpha} out of range 0..{self._degree - 1}")

    def __repr__(self) -> str:
        return f"PermGroup(degree={self._degree}, ngens={len(self.generators)})"


class ActionContext(NamedTuple):
    """A group together with the point set it acts on and a chosen base point."""

    group: PermGroup
    omega_size: int
    base_point: int

    def validate(self) -> "ActionContext":
        if self.group.degree != self.omega_size:
            raise InvalidPermutationError(
                f"group degree {self.group.degree} does not match omega size {self.omega_size}"
            )
        if not 0 <= self.base_point < self.omega_size:
            raise InvalidPermutationError(f"base point {self.base_point} out of range")
        return self


def minimal_block_size(
    images: Sequence[Sequence[int]], degree: int, alpha: int, beta: int
) -> int:
    """Size of the minimal invariant block containing {alpha, beta} (union-find).

    Works directly on generator image arrays so it can also serve induced
    actions (for example a group permuting an orbit of blocks by index).
    """
    parent = list(range(degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> int | None:
        rx, ry = find(x), find(y)
        if rx == ry:
            return None
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx
        return ry

    queue = [(alpha, beta)]
    union(alpha, beta)
    while queue:
        x, y = queue.pop()
        for imgs in images:
            merged = union(imgs[x], imgs[y])
            if merged is not None:
                queue.append((imgs[x], imgs[y]))
    root = find(alpha)
    return sum(1 for x in range(degree) if find(x) == root)


def _dedupe(perms: Iterable[Permutation]) -> list[Permutation]:
    seen: set[tuple[int, ...]] = set()
    out = []
    for p in perms:
        if p.images not in seen:
            seen.add(p.images)
            out.append(p)
    return out
