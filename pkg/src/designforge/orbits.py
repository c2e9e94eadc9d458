"""Orbits of a permutation group on k-subsets of its point set.

The full partition of all C(n, k) subsets is computed orbit by orbit:
the seed of each new orbit is the lexicographically smallest subset not
yet covered, found by scanning a dense coverage bitmap indexed by lex
rank, so memory stays proportional to C(n, k) / 8 bytes plus the BFS
frontier. Degrees up to 64 run on packed uint64 masks with vectorized
expansion; larger degrees (up to 512) fall back to Python integer masks.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import combin
from .errors import ConsistencyError, InvalidPermutationError, ResourceLimitError
from .perm import PermGroup, Permutation

MAX_BLOCK_DEGREE = 512
DEFAULT_SUBSET_CAP = 10**8
DEFAULT_ORBIT_CAP = 10**7
DEFAULT_WORK_CAP = 10**9


@dataclass(frozen=True)
class Block:
    """A k-subset of {0, ..., n-1}: sorted distinct points plus the degree."""

    points: tuple[int, ...]
    degree: int

    def __post_init__(self):
        pts = tuple(sorted(self.points))
        if self.degree > MAX_BLOCK_DEGREE:
            raise InvalidPermutationError(f"block degree {self.degree} exceeds {MAX_BLOCK_DEGREE}")
        if pts and (pts[0] < 0 or pts[-1] >= self.degree):
            raise InvalidPermutationError("block points out of range")
        if len(set(pts)) != len(pts):
            raise InvalidPermutationError("block points must be distinct")
        object.__setattr__(self, "points", pts)

    @property
    def k(self) -> int:
        return len(self.points)

    def mask(self) -> int:
        m = 0
        for x in self.points:
            m |= 1 << x
        return m

    @staticmethod
    def from_mask(mask: int, degree: int) -> "Block":
        return Block(tuple(_mask_points(mask)), degree)

    def complement(self) -> "Block":
        inside = set(self.points)
        return Block(tuple(x for x in range(self.degree) if x not in inside), self.degree)

    def image(self, g: Permutation) -> "Block":
        return Block(tuple(g.images[x] for x in self.points), self.degree)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point: int) -> bool:
        return point in self.points


@dataclass(frozen=True)
class BlockOrbit:
    """One orbit of k-subsets: canonical representative, size, and the
    members when they were materialized (small orbits only)."""

    representative: Block
    size: int
    members: tuple[Block, ...] | None = None

    @property
    def k(self) -> int:
        return self.representative.k

    @property
    def degree(self) -> int:
        return self.representative.degree

    def member_matrix(self) -> np.ndarray:
        """Members as an (size, k) uint16 array of sorted points."""
        if self.members is None:
            raise ConsistencyError("orbit members were not materialized")
        return np.array([b.points for b in self.members], dtype=np.uint16)


@dataclass(frozen=True)
class OrbitPartition:
    """All orbits of a group on k-subsets, ordered by (size, representative)."""

    degree: int
    k: int
    orbits: tuple[BlockOrbit, ...]
    group_name: str | None = None

    def sizes(self) -> tuple[int, ...]:
        return tuple(o.size for o in self.orbits)

    def size_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for o in self.orbits:
            out[o.size] = out.get(o.size, 0) + 1
        return out

    def exponent_string(self) -> str:
        """Multiset of orbit sizes like '462, 3696^2, 18480'."""
        parts = []
        for size in sorted(self.size_multiset()):
            mult = self.size_multiset()[size]
            parts.append(f"{size}^{mult}" if mult > 1 else f"{size}")
        return ", ".join(parts)

    def is_trivial(self) -> bool:
        return len(self.orbits) <= 1

    def total(self) -> int:
        return sum(o.size for o in self.orbits)

    def to_json(self) -> str:
        doc = {
            "group": self.group_name,
            "degree": self.degree,
            "k": self.k,
            "orbits": [
                {"size": o.size, "representative": [x + 1 for x in o.representative.points]}
                for o in self.orbits
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "OrbitPartition":
        doc = json.loads(text)
        degree, k = doc["degree"], doc["k"]
        orbits = tuple(
            BlockOrbit(Block(tuple(x - 1 for x in entry["representative"]), degree), entry["size"])
            for entry in doc["orbits"]
        )
        return OrbitPartition(degree, k, orbits, doc.get("group"))


def is_trivial_partition(partition: OrbitPartition) -> bool:
    """True when every k-subset lies in a single orbit."""
    return partition.is_trivial()


def _mask_points(mask: int) -> Iterable[int]:
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


def apply_to_mask(mask: int, images: Sequence[int]) -> int:
    """Image of a point-set bitmask under a permutation given by its image row."""
    out = 0
    while mask:
        lsb = mask & -mask
        out |= 1 << images[lsb.bit_length() - 1]
        mask ^= lsb
    return out


def _mask_of(points: Iterable[int]) -> int:
    m = 0
    for x in points:
        m |= 1 << x
    return m


class _WorkMeter:
    """Counts generator applications against a cap."""

    def __init__(self, cap: int):
        self.cap = cap
        self.done = 0

    def charge(self, amount: int) -> None:
        self.done += amount
        if self.done > self.cap:
            raise ResourceLimitError("work", self.cap, self.done)


def block_orbit(
    group: PermGroup,
    block: Block | Sequence[int],
    *,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    max_work: int = DEFAULT_WORK_CAP,
    materialize: bool = True,
) -> BlockOrbit:
    """BFS closure of one k-subset under the group action.

    The representative of the returned orbit is the lexicographically
    smallest member, independent of the input block chosen.
    """
    if not isinstance(block, Block):
        block = Block(tuple(block), group.degree)
    if block.degree != group.degree:
        raise InvalidPermutationError("block degree does not match group degree")
    meter = _WorkMeter(max_work)
    gen_images = [g.images for g in group.generators]
    start = block.mask()
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        meter.charge(len(frontier) * max(len(gen_images), 1))
        for m in frontier:
            for imgs in gen_images:
                im = 0
                mm = m
                while mm:
                    lsb = mm & -mm
                    im |= 1 << imgs[lsb.bit_length() - 1]
                    mm ^= lsb
                if im not in seen:
                    seen.add(im)
                    nxt.append(im)
        if len(seen) > max_orbit:
            raise ResourceLimitError("orbit size", max_orbit, len(seen))
        frontier = nxt
    rep = Block(min(tuple(_mask_points(m)) for m in seen), group.degree)
    members = None
    if materialize:
        members = tuple(
            sorted(
                (Block.from_mask(m, group.degree) for m in seen),
                key=lambda blk: blk.points,
            )
        )
    return BlockOrbit(rep, len(seen), members)


def block_stabilizer_order(group: PermGroup, orbit: BlockOrbit | Block | Sequence[int]) -> int:
    """Order of the setwise stabilizer of a block, from the orbit size."""
    if isinstance(orbit, BlockOrbit):
        size = orbit.size
    else:
        size = block_orbit(group, orbit, materialize=False).size
    order = group.order()
    if order % size != 0:
        raise ConsistencyError(f"orbit size {size} does not divide group order {order}")
    return order // size


def set_stabilizer(
    group: PermGroup,
    block: Block | Sequence[int],
    *,
    max_orbit: int = DEFAULT_ORBIT_CAP,
) -> PermGroup:
    """Setwise stabilizer of a block, via Schreier generators on its orbit.

    Generators accumulate in deterministic BFS order until the known order
    |G| / |orbit| is reached.
    """
    if not isinstance(block, Block):
        block = Block(tuple(block), group.degree)
    start = block.mask()
    gen_list = list(group.generators)
    gen_images = [g.images for g in gen_list]
    transversal: dict[int, Permutation] = {start: group.identity}
    order_list = [start]
    i = 0
    while i < len(order_list):
        m = order_list[i]
        i += 1
        um = transversal[m]
        for g, imgs in zip(gen_list, gen_images):
            im = 0
            mm = m
            while mm:
                lsb = mm & -mm
                im |= 1 << imgs[lsb.bit_length() - 1]
                mm ^= lsb
            if im not in transversal:
                transversal[im] = um * g
                order_list.append(im)
        if len(order_list) > max_orbit:
            raise ResourceLimitError("orbit size", max_orbit, len(order_list))
    orbit_size = len(order_list)
    target = group.order() // orbit_size
    if group.order() % orbit_size != 0:
        raise ConsistencyError("orbit size does not divide group order")
    stab_gens: list[Permutation] = []
    seen_imgs: set[tuple[int, ...]] = set()
    current = PermGroup([], group.degree)
    for m in order_list:
        um = transversal[m]
        for g, imgs in zip(gen_list, gen_images):
            im = 0
            mm = m
            while mm:
                lsb = mm & -mm
                im |= 1 << imgs[lsb.bit_length() - 1]
                mm ^= lsb
            schreier = um * g * transversal[im].inverse()
            if schreier.is_identity() or schreier.images in seen_imgs:
                continue
            seen_imgs.add(schreier.images)
            if schreier in current:
                continue
            stab_gens.append(schreier)
            current = PermGroup(stab_gens, group.degree)
            if current.order() == target:
                return current
    if current.order() != target:
        raise ConsistencyError(
            f"Schreier generators closed at order {current.order()}, expected {target}"
        )
    return current


def orbit_partition(
    group: PermGroup,
    k: int,
    *,
    max_subsets: int = DEFAULT_SUBSET_CAP,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    max_work: int = DEFAULT_WORK_CAP,
    threads: int = 1,
    materialize: bool = False,
    group_name: str | None = None,
) -> OrbitPartition:
    """Partition all k-subsets of the point set into group orbits.

    Orbits are discovered from lexicographically smallest seeds and the
    result is ordered by (size, representative). The outcome is identical
    for every thread count; threads only shard the BFS expansion step.
    """
    n = group.degree
    if not 0 <= k <= n:
        raise InvalidPermutationError(f"k={k} out of range for degree {n}")
    if n > MAX_BLOCK_DEGREE:
        raise InvalidPermutationError(f"degree {n} exceeds block degree limit {MAX_BLOCK_DEGREE}")
    total = math.comb(n, k)
    if total > max_subsets:
        raise ResourceLimitError("subset count", max_subsets, total)
    if k == 0 or total == 1:
        only = Block(tuple(range(k)) if k else (), n)
        orbit = BlockOrbit(only, 1, (only,) if materialize else None)
        return OrbitPartition(n, k, (orbit,), group_name)
    if n <= 64:
        raw = _partition_packed(group, k, total, max_orbit, max_work, threads, materialize)
    else:
        raw = _partition_bigint(group, k, total, max_orbit, max_work, materialize)
    orbits = tuple(sorted(raw, key=lambda o: (o.size, o.representative.points)))
    found = sum(o.size for o in orbits)
    if found != total:
        raise ConsistencyError(f"orbits cover {found} subsets, expected {total}")
    return OrbitPartition(n, k, orbits, group_name)


# Alias matching the classical Sigma_k(G|Omega) notation for this partition.
sigma_partition = orbit_partition


def _partition_packed(
    group: PermGroup,
    k: int,
    total: int,
    max_orbit: int,
    max_work: int,
    threads: int,
    materialize: bool,
) -> list[BlockOrbit]:
    """Dense-bitmap partition on uint64 masks for degrees up to 64."""
    n = group.degree
    meter = _WorkMeter(max_work)
    table = combin.comb_table(n, k + 1)
    covered = np.zeros(total, dtype=bool)
    scan_from = 0

    point_maps = []
    for g in group.generators:
        inv = np.zeros(n, dtype=np.int64)
        for x, y in enumerate(g.images):
            inv[y] = x
        point_maps.append(inv)
    if not point_maps:
        point_maps.append(np.arange(n, dtype=np.int64))

    bit_cols = np.arange(n, dtype=np.uint64)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def unpack(masks: np.ndarray) -> np.ndarray:
        return ((masks[:, None] >> bit_cols[None, :]) & np.uint64(1)).astype(bool)

    def pack(bits: np.ndarray) -> np.ndarray:
        weights = (np.uint64(1) << bit_cols).astype(np.uint64)
        return (bits.astype(np.uint64) * weights[None, :]).sum(axis=1, dtype=np.uint64)

    def apply_gen(bits: np.ndarray, inv: np.ndarray) -> np.ndarray:
        return pack(bits[:, inv])

    def expand(frontier_masks: np.ndarray) -> np.ndarray:
        bits = unpack(frontier_masks)
        if pool is None or len(frontier_masks) < 4096:
            images = [apply_gen(bits, inv) for inv in point_maps]
        else:
            chunks = np.array_split(np.arange(len(frontier_masks)), threads)
            chunks = [c for c in chunks if len(c)]
            images = []
            for inv in point_maps:
                parts = list(pool.map(lambda c, i=inv: apply_gen(bits[c], i), chunks))
                images.append(np.concatenate(parts))
        return np.concatenate(images) if images else frontier_masks[:0]

    def ranks_of(masks: np.ndarray) -> np.ndarray:
        bits = unpack(masks)
        rows, cols = np.nonzero(bits)
        cols = cols.reshape(len(masks), k)
        return combin.lex_rank_rows(cols, n, table)

    try:
        orbits: list[BlockOrbit] = []
        while True:
            nz = np.flatnonzero(~covered[scan_from:])
            if len(nz) == 0:
                break
            seed_rank = scan_from + int(nz[0])
            scan_from = seed_rank
            seed = combin.lex_unrank(seed_rank, n, k)
            covered[seed_rank] = True
            frontier = np.array([_mask_of(seed)], dtype=np.uint64)
            size = 1
            member_ranks = [seed_rank] if materialize else None
            while len(frontier):
                meter.charge(len(frontier) * len(point_maps))
                images = expand(frontier)
                images = np.unique(images)
                img_ranks = ranks_of(images)
                fresh = ~covered[img_ranks]
                covered[img_ranks[fresh]] = True
                frontier = images[fresh]
                size += int(fresh.sum())
                if size > max_orbit:
                    raise ResourceLimitError("orbit size", max_orbit, size)
                if materialize:
                    member_ranks.extend(img_ranks[fresh].tolist())
            members = None
            if materialize:
                members = tuple(
                    Block(combin.lex_unrank(r, n, k), n) for r in sorted(member_ranks)
                )
            orbits.append(BlockOrbit(Block(seed, n), size, members))
        return orbits
    finally:
        if pool is not None:
            pool.shutdown()


def _partition_bigint(
    group: PermGroup,
    k: int,
    total: int,
    max_orbit: int,
    max_work: int,
    materialize: bool,
) -> list[BlockOrbit]:
    """Python-integer-mask partition for 64 < degree <= 512."""
    n = group.degree
    meter = _WorkMeter(max_work)
    gen_images = [g.images for g in group.generators]
    covered = bytearray((total + 7) // 8)
    scan_byte = 0

    def covered_test(r: int) -> bool:
        return bool(covered[r >> 3] & (1 << (r & 7)))

    def covered_set(r: int) -> None:
        covered[r >> 3] |= 1 << (r & 7)

    orbits: list[BlockOrbit] = []
    while True:
        while scan_byte < len(covered) and covered[scan_byte] == 0xFF:
            scan_byte += 1
        seed_rank = None
        for r in range(scan_byte * 8, min(scan_byte * 8 + 8, total)):
            if not covered_test(r):
                seed_rank = r
                break
        if seed_rank is None:
            if scan_byte >= len(covered):
                break
            scan_byte += 1
            continue
        seed = combin.lex_unrank(seed_rank, n, k)
        covered_set(seed_rank)
        seen = {_mask_of(seed)}
        frontier = list(seen)
        while frontier:
            meter.charge(len(frontier) * max(len(gen_images), 1))
            nxt = []
            for m in frontier:
                for imgs in gen_images:
                    im = 0
                    mm = m
                    while mm:
                        lsb = mm & -mm
                        im |= 1 << imgs[lsb.bit_length() - 1]
                        mm ^= lsb
                    if im not in seen:
                        seen.add(im)
                        nxt.append(im)
            if len(seen) > max_orbit:
                raise ResourceLimitError("orbit size", max_orbit, len(seen))
            frontier = nxt
        for m in seen:
            if m != _mask_of(seed):
                covered_set(combin.lex_rank(tuple(_mask_points(m)), n))
        members = None
        if materialize:
            members = tuple(
                sorted((Block.from_mask(m, n) for m in seen), key=lambda blk: blk.points)
            )
        orbits.append(BlockOrbit(Block(seed, n), len(seen), members))
    return orbits


def complement_partition(group: PermGroup, partition: OrbitPartition, **caps) -> OrbitPartition:
    """The orbit partition on (n-k)-subsets obtained by complementing blocks.

    Orbit sizes are preserved; representatives are recomputed so each is the
    lexicographically smallest member of its complemented orbit.
    """
    n = partition.degree
    orbits = []
    for o in partition.orbits:
        comp = o.representative.complement()
        new = block_orbit(group, comp, materialize=False, **caps)
        if new.size != o.size:
            raise ConsistencyError(
                f"complement orbit size {new.size} differs from original {o.size}"
            )
        orbits.append(new)
    orbits.sort(key=lambda o: (o.size, o.representative.points))
    return OrbitPartition(n, n - partition.k, tuple(orbits), partition.group_name)
