"""Construct and certify block designs built from permutation group orbits."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable

import numpy as np

from .combin import comb_table
from .errors import ConsistencyError, ResourceLimitError, VerificationError
from .orbits import (
    DEFAULT_ORBIT_CAP,
    DEFAULT_WORK_CAP,
    Block,
    BlockOrbit,
    apply_to_mask,
    block_orbit,
    set_stabilizer,
)
from .perm import PermGroup, minimal_block_size

# Block actions up to this index get an exhaustive primitivity check; beyond
# it, maximality of the subgroup is recorded as asserted rather than verified.
MAX_VERIFIED_BLOCK_INDEX = 10_000
# Designs with more blocks than this serialize without an explicit block list.
BLOCKS_JSON_LIMIT = 10**5

_BATCH_CELLS = 1 << 22


@dataclass
class TDesignCertificate:
    """Outcome of an exhaustive coverage count at level t."""

    t: int
    lambda_t: int | None
    verified: bool
    coverage_histogram: dict[int, int]
    subsets_checked: int


@dataclass
class Design:
    """A block design whose block set is a single group orbit of point sets."""

    v: int
    b: int
    k: int
    r: int
    orbit: BlockOrbit
    group: PermGroup | None = None
    group_name: str | None = None
    construction: dict = field(default_factory=dict)
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.b * self.k != self.v * self.r:
            raise ConsistencyError(
                f"design identity violated: b*k = {self.b * self.k} but v*r = {self.v * self.r}"
            )
        if self.orbit.representative.k != self.k:
            raise ConsistencyError("representative block size differs from k")

    @property
    def representative(self) -> Block:
        return self.orbit.representative

    def parameters(self) -> tuple[int, int, int, int]:
        """The tuple (v, b, k, r)."""
        return (self.v, self.b, self.k, self.r)

    def blocks(
        self,
        *,
        max_orbit: int = DEFAULT_ORBIT_CAP,
        max_work: int = DEFAULT_WORK_CAP,
    ) -> tuple[Block, ...]:
        """All blocks in lexicographic order, materializing the orbit on first use."""
        if self.orbit.members is None:
            if self.group is None:
                raise ConsistencyError("blocks are not materialized and no group is attached")
            full = block_orbit(
                self.group,
                self.representative,
                max_orbit=max_orbit,
                max_work=max_work,
                materialize=True,
            )
            if full.size != self.b:
                raise ConsistencyError(
                    f"recomputed orbit size {full.size} differs from recorded b = {self.b}"
                )
            self.orbit = full
        return self.orbit.members

    def block_matrix(self, **caps) -> np.ndarray:
        """All blocks as a (b, k) array of 0-based point columns."""
        self.blocks(**caps)
        return self.orbit.member_matrix()


@dataclass(frozen=True)
class BlockDecomposition:
    """A representative block split into orbits of its setwise stabilizer."""

    block: Block
    stabilizer_order: int
    orbits: tuple[tuple[int, ...], ...]
    block_primitive: bool | None

    @property
    def orbit_sizes(self) -> tuple[int, ...]:
        return tuple(len(orb) for orb in self.orbits)


def design_from_orbit(
    group: PermGroup,
    orbit: BlockOrbit,
    *,
    group_name: str | None = None,
) -> Design:
    """Block-transitive 1-(n, k, kb/n) design whose blocks form one subset orbit."""
    if orbit.degree != group.degree:
        raise ValueError("orbit degree does not match group degree")
    if not group.is_transitive():
        raise ValueError("group is not transitive on points")
    v = group.degree
    b = orbit.size
    k = orbit.k
    if (b * k) % v != 0:
        raise ConsistencyError(f"non-integral replication number {b}*{k}/{v}")
    construction = {"method": "subset-orbit", "group": group_name, "k": k, "orbit_size": b}
    return Design(
        v,
        b,
        k,
        b * k // v,
        orbit,
        group=group,
        group_name=group_name,
        construction=construction,
    )


def design_from_maximal(
    group: PermGroup,
    subgroup: PermGroup,
    alpha: int,
    *,
    group_name: str | None = None,
    subgroup_name: str | None = None,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    max_work: int = DEFAULT_WORK_CAP,
    verify_index_limit: int = MAX_VERIFIED_BLOCK_INDEX,
) -> Design:
    """Design whose block is the subgroup orbit of alpha, with all group images."""
    group._check_point(alpha)
    delta = subgroup.point_orbit(alpha)
    construction = {
        "method": "maximal-subgroup-orbit",
        "group": group_name,
        "subgroup": subgroup_name,
        "subgroup_order": subgroup.order(),
        "alpha": alpha + 1,
    }
    return _design_from_invariant_block(
        group,
        subgroup,
        delta,
        construction,
        group_name=group_name,
        max_orbit=max_orbit,
        max_work=max_work,
        verify_index_limit=verify_index_limit,
    )


def merge_orbits(
    group: PermGroup,
    subgroup: PermGroup,
    orbit_indices,
    *,
    group_name: str | None = None,
    subgroup_name: str | None = None,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    max_work: int = DEFAULT_WORK_CAP,
    verify_index_limit: int = MAX_VERIFIED_BLOCK_INDEX,
) -> Design:
    """Design whose block merges several subgroup orbits, selected by index."""
    suborbits = subgroup.orbits()
    chosen = sorted(set(orbit_indices))
    if not chosen:
        raise ValueError("orbit selection is empty")
    if chosen[0] < 0 or chosen[-1] >= len(suborbits):
        raise ValueError(
            f"orbit index out of range 0..{len(suborbits) - 1}: {chosen}"
        )
    points = tuple(sorted(p for i in chosen for p in suborbits[i]))
    construction = {
        "method": "suborbit-merge",
        "group": group_name,
        "subgroup": subgroup_name,
        "subgroup_order": subgroup.order(),
        "merged_indices": chosen,
        "merged_sizes": [len(suborbits[i]) for i in chosen],
    }
    return _design_from_invariant_block(
        group,
        subgroup,
        points,
        construction,
        group_name=group_name,
        max_orbit=max_orbit,
        max_work=max_work,
        verify_index_limit=verify_index_limit,
    )


def _design_from_invariant_block(
    group: PermGroup,
    subgroup: PermGroup,
    points,
    construction: dict,
    *,
    group_name: str | None,
    max_orbit: int,
    max_work: int,
    verify_index_limit: int,
) -> Design:
    """Shared core: orbit of a subgroup-invariant point set under the full group."""
    v = group.degree
    if not group.is_primitive():
        raise ValueError("group is not primitive on points")
    for g in subgroup.generators:
        if g not in group:
            raise ValueError("subgroup generator lies outside the group")
    stab_order = group.order() // v
    m_order = subgroup.order()
    if m_order > stab_order:
        raise ValueError(
            f"subgroup order {m_order} exceeds point-stabilizer order {stab_order}"
        )
    points = tuple(sorted(points))
    if len(points) == v:
        omega = Block(tuple(range(v)), v)
        construction = dict(construction, degenerate=True)
        return Design(
            v,
            1,
            v,
            1,
            BlockOrbit(omega, 1, (omega,)),
            group=group,
            group_name=group_name,
            construction=construction,
            degenerate=True,
        )
    seed = Block(points, v)
    orbit = block_orbit(
        group, seed, max_orbit=max_orbit, max_work=max_work, materialize=True
    )
    k = len(points)
    b = orbit.size
    if (stab_order * k) % m_order != 0:
        raise ConsistencyError(
            f"non-integral replication number {stab_order}*{k}/{m_order}"
        )
    r = stab_order * k // m_order
    if b * k != v * r:
        raise ConsistencyError(
            f"replication mismatch: |G_a|*k/|M| gives r = {r} but k*b/v = "
            f"{Fraction(b * k, v)}; the block stabilizer has order "
            f"{group.order() // b}, not {m_order}"
        )
    if b <= verify_index_limit:
        if not _block_action_primitive(group, subgroup, orbit, seed.mask()):
            raise ConsistencyError(
                "subgroup is not maximal: the block action admits a nontrivial block system"
            )
        construction = dict(construction, maximality="verified", block_action="primitive")
    else:
        construction = dict(construction, maximality="asserted", block_action="transitive")
    return Design(
        v, b, k, r, orbit, group=group, group_name=group_name, construction=construction
    )


def decompose_block(
    group: PermGroup,
    design: Design,
    *,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    verify_index_limit: int = MAX_VERIFIED_BLOCK_INDEX,
) -> BlockDecomposition:
    """Partition a representative block into orbits of its setwise stabilizer."""
    block = design.representative
    stab = set_stabilizer(group, block, max_orbit=max_orbit)
    if group.order() != stab.order() * design.b:
        raise ConsistencyError(
            f"stabilizer order {stab.order()} inconsistent with block count {design.b}"
        )
    inside = []
    for orb in stab.orbits():
        if orb[0] in block:
            if any(p not in block for p in orb):
                raise ConsistencyError("stabilizer orbit straddles the block boundary")
            inside.append(orb)
    inside.sort(key=lambda orb: (len(orb), orb))
    block_primitive = None
    if design.b <= verify_index_limit:
        orbit = block_orbit(group, block, max_orbit=max_orbit, materialize=True)
        block_primitive = _block_action_primitive(group, stab, orbit, block.mask())
    return BlockDecomposition(
        block=block,
        stabilizer_order=stab.order(),
        orbits=tuple(tuple(orb) for orb in inside),
        block_primitive=block_primitive,
    )


def _block_action_primitive(
    group: PermGroup, stabilizer: PermGroup, orbit: BlockOrbit, base_mask: int
) -> bool:
    """Whether the group acts primitively on a materialized block orbit."""
    if orbit.members is None:
        raise ConsistencyError("primitivity check needs a materialized orbit")
    masks = [blk.mask() for blk in orbit.members]
    n = len(masks)
    if n == 1:
        return True
    index = {m: i for i, m in enumerate(masks)}

    def induced(images) -> list[int]:
        return [index[apply_to_mask(m, images)] for m in masks]

    g_images = [induced(g.images) for g in group.generators]
    s_images = [induced(g.images) for g in stabilizer.generators]
    alpha = index[base_mask]
    assigned = [False] * n
    assigned[alpha] = True
    for start in range(n):
        if assigned[start]:
            continue
        component = [start]
        assigned[start] = True
        at = 0
        while at < len(component):
            x = component[at]
            at += 1
            for imgs in s_images:
                y = imgs[x]
                if not assigned[y]:
                    assigned[y] = True
                    component.append(y)
        if minimal_block_size(g_images, n, alpha, start) != n:
            return False
    return True


def verify_t_design(
    design: Design,
    t: int,
    *,
    max_work: int = DEFAULT_WORK_CAP,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    threads: int = 1,
) -> TDesignCertificate:
    """Exhaustively count how many blocks cover each t-subset of points."""
    if not 1 <= t <= design.k:
        raise ValueError(f"level t = {t} outside 1..k = {design.k}")
    v, b, k = design.v, design.b, design.k
    work = b * comb(k, t)
    if work > max_work:
        raise ResourceLimitError("coverage work", max_work, work)
    matrix = design.block_matrix(max_orbit=max_orbit, max_work=max_work)
    counts = _coverage_counts(matrix, v, t, threads=threads)
    if int(counts.sum()) != work:
        raise ConsistencyError("coverage accumulation lost increments")
    values, freq = np.unique(counts, return_counts=True)
    histogram = {int(a): int(c) for a, c in zip(values, freq)}
    verified = len(histogram) == 1
    lam = int(values[0]) if verified else None
    return TDesignCertificate(t, lam, verified, histogram, comb(v, t))


def _coverage_counts(matrix: np.ndarray, v: int, t: int, *, threads: int = 1) -> np.ndarray:
    """Coverage counters over all t-subsets, indexed by colexicographic rank."""
    size = comb(v, t)
    b, k = matrix.shape
    if b == 0:
        return np.zeros(size, dtype=np.int64)
    table = comb_table(v, t)
    combos = np.array(list(combinations(range(k), t)), dtype=np.intp)
    if threads > 1 and b >= 2 * threads:
        shards = np.array_split(matrix, threads, axis=0)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda sh: _count_shard(sh, combos, table, size, t), shards)
            )
        total = parts[0]
        for part in parts[1:]:
            total += part
        return total
    return _count_shard(matrix, combos, table, size, t)


def _count_shard(
    matrix: np.ndarray, combos: np.ndarray, table: np.ndarray, size: int, t: int
) -> np.ndarray:
    """Per-shard coverage counts, batching combination columns to bound memory."""
    out = np.zeros(size, dtype=np.int64)
    rows = matrix.shape[0]
    idx = matrix.astype(np.intp, copy=False)
    step = max(1, _BATCH_CELLS // rows)
    for s in range(0, len(combos), step):
        cols = combos[s : s + step]
        ranks = np.zeros((rows, len(cols)), dtype=np.int64)
        for i in range(t):
            ranks += table[idx[:, cols[:, i]], i + 1]
        out += np.bincount(ranks.ravel(), minlength=size)
    return out


def lambda_s(lambda_t: int, t: int, s: int, v: int, k: int) -> Fraction:
    """Coverage at level s implied by a t-(v, k, lambda_t) design, as an exact rational."""
    if not 1 <= s <= t <= k <= v:
        raise ValueError("need 1 <= s <= t <= k <= v")
    return Fraction(lambda_t * comb(v - s, t - s), comb(k - s, t - s))


def complement_design(
    design: Design,
    *,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    max_work: int = DEFAULT_WORK_CAP,
) -> Design:
    """Design on the same points whose blocks are the set complements."""
    if design.k >= design.v:
        raise ValueError("complement requires k < v")
    v, b = design.v, design.b
    members = None
    if design.orbit.members is not None:
        members = tuple(
            sorted(
                (blk.complement() for blk in design.orbit.members),
                key=lambda blk: blk.points,
            )
        )
        rep = members[0]
    elif design.group is not None:
        probe = block_orbit(
            design.group,
            design.representative.complement(),
            max_orbit=max_orbit,
            max_work=max_work,
            materialize=False,
        )
        if probe.size != b:
            raise ConsistencyError(
                f"complement orbit size {probe.size} differs from b = {b}"
            )
        rep = probe.representative
    else:
        rep = design.representative.complement()
    construction = {"method": "complement", "of": design.construction}
    return Design(
        v,
        b,
        v - design.k,
        b - design.r,
        BlockOrbit(rep, b, members),
        group=design.group,
        group_name=design.group_name,
        construction=construction,
    )


def max_t(
    design: Design,
    *,
    max_work: int = DEFAULT_WORK_CAP,
    max_orbit: int = DEFAULT_ORBIT_CAP,
    threads: int = 1,
) -> TDesignCertificate:
    """Certificate at the largest verifying t, bounded by group transitivity and k."""
    bound = design.k
    if design.group is not None:
        degree = design.group.transitivity_degree(cap=bound)
        if not degree.capped:
            bound = min(bound, degree.value)
    best: TDesignCertificate | None = None
    for t in range(1, bound + 1):
        cert = verify_t_design(
            design, t, max_work=max_work, max_orbit=max_orbit, threads=threads
        )
        if not cert.verified:
            break
        best = cert
    if best is None:
        raise VerificationError("coverage is not constant even at t = 1")
    return best


def design_to_json(
    design: Design,
    certificate: TDesignCertificate | None = None,
    *,
    include_blocks: bool | None = None,
) -> str:
    """Serialize a design (optionally with a certificate) to a JSON document."""
    if include_blocks is None:
        include_blocks = design.b <= BLOCKS_JSON_LIMIT and (
            design.orbit.members is not None or design.group is not None
        )
    doc: dict = {
        "v": design.v,
        "b": design.b,
        "k": design.k,
        "r": design.r,
        "t": certificate.t if certificate is not None else None,
        "lambda_t": certificate.lambda_t if certificate is not None else None,
        "construction": design.construction,
        "group": design.group_name,
        "degenerate": design.degenerate,
        "representative": [p + 1 for p in design.representative.points],
    }
    if include_blocks:
        doc["blocks"] = [[p + 1 for p in blk.points] for blk in design.blocks()]
    return json.dumps(doc, indent=2, sort_keys=True)


def design_from_json(
    text: str,
    group_resolver: Callable[[str], PermGroup] | None = None,
) -> tuple[Design, int | None, int | None]:
    """Rebuild (design, t, lambda_t) from a JSON document without re-verifying."""
    doc = json.loads(text)
    v, b, k, r = (int(doc[key]) for key in ("v", "b", "k", "r"))
    rep = Block(tuple(sorted(int(p) - 1 for p in doc["representative"])), v)
    members = None
    if "blocks" in doc:
        members = tuple(
            sorted(
                (Block(tuple(sorted(int(p) - 1 for p in row)), v) for row in doc["blocks"]),
                key=lambda blk: blk.points,
            )
        )
        if len(members) != b:
            raise ValueError(f"document lists {len(members)} blocks but b = {b}")
        if len({blk.points for blk in members}) != b:
            raise ValueError("document lists duplicate blocks")
        if members[0].points != rep.points:
            raise ValueError("representative is not the smallest listed block")
    group = None
    name = doc.get("group")
    if name is not None and group_resolver is not None:
        group = group_resolver(name)
    design = Design(
        v,
        b,
        k,
        r,
        BlockOrbit(rep, b, members),
        group=group,
        group_name=name,
        construction=doc.get("construction") or {},
        degenerate=bool(doc.get("degenerate", False)),
    )
    t = int(doc["t"]) if doc.get("t") is not None else None
    lam = int(doc["lambda_t"]) if doc.get("lambda_t") is not None else None
    return design, t, lam
