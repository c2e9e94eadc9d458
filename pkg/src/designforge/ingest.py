"""Parse permutation generator files and resolve groups through a named registry."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import IngestError
from .perm import PermGroup, Permutation

REGISTRY_ENV_VAR = "DESIGNFORGE_REGISTRY"
GROUP_ROLE = "group"
SUBGROUP_ROLE_PREFIX = "maximal-subgroup-of:"


def parse_permutation(text: str, degree: int, *, line: int | None = None) -> Permutation:
    """Parse one permutation line, in cycle notation or as a 1-based image list."""
    stripped = text.strip()
    if not stripped:
        raise IngestError("empty permutation", line=line, column=1)
    if stripped.startswith("("):
        return _parse_cycles(text, degree, line)
    return _parse_image_list(text, degree, line)


# Alias for callers that only deal in cycle notation.
parse_cycles = parse_permutation


def _parse_image_list(text: str, degree: int, line: int | None) -> Permutation:
    images = [0] * degree
    seen = [False] * degree
    count = 0
    pos = 0
    length = len(text)
    while pos < length:
        if text[pos].isspace():
            pos += 1
            continue
        start = pos
        while pos < length and not text[pos].isspace():
            pos += 1
        token = text[start:pos]
        try:
            value = int(token)
        except ValueError:
            raise IngestError(f"expected an integer, got {token!r}", line=line, column=start + 1)
        if not 1 <= value <= degree:
            raise IngestError(f"point {value} out of range 1..{degree}", line=line, column=start + 1)
        if count >= degree:
            raise IngestError(f"more than {degree} images listed", line=line, column=start + 1)
        if seen[value - 1]:
            raise IngestError(f"point {value} repeated", line=line, column=start + 1)
        seen[value - 1] = True
        images[count] = value - 1
        count += 1
    if count != degree:
        raise IngestError(f"expected {degree} images, got {count}", line=line, column=len(text) + 1)
    return Permutation(images)


def _parse_cycles(text: str, degree: int, line: int | None) -> Permutation:
    images = list(range(degree))
    used = [False] * degree
    pos = 0
    length = len(text)
    depth = 0
    cycle: list[int] = []
    cycle_col = 1
    while pos < length:
        ch = text[pos]
        if ch.isspace() or ch == ",":
            pos += 1
            continue
        if ch == "(":
            if depth:
                raise IngestError("nested parenthesis", line=line, column=pos + 1)
            depth = 1
            cycle = []
            cycle_col = pos + 1
            pos += 1
            continue
        if ch == ")":
            if not depth:
                raise IngestError("unbalanced ')'", line=line, column=pos + 1)
            depth = 0
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a] = b
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < length and text[pos].isdigit():
                pos += 1
            if not depth:
                raise IngestError("point outside any cycle", line=line, column=start + 1)
            value = int(text[start:pos])
            if not 1 <= value <= degree:
                raise IngestError(
                    f"point {value} out of range 1..{degree}", line=line, column=start + 1
                )
            if used[value - 1]:
                raise IngestError(f"point {value} repeated", line=line, column=start + 1)
            used[value - 1] = True
            cycle.append(value - 1)
            continue
        raise IngestError(f"unexpected character {ch!r}", line=line, column=pos + 1)
    if depth:
        raise IngestError("unbalanced '('", line=line, column=cycle_col)
    return Permutation(images)


def permutation_to_cycles(perm: Permutation) -> str:
    """Render a permutation in 1-based cycle notation ("()" for the identity)."""
    cycles = perm.cycles()
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(p + 1) for p in cyc) + ")" for cyc in cycles)


@dataclass(frozen=True)
class GeneratorFile:
    """A parsed generator file: degree, permutations, and optional metadata."""

    degree: int
    permutations: tuple[Permutation, ...]
    name: str | None = None
    expected_order: int | None = None
    note: str | None = None

    def group(self) -> PermGroup:
        return PermGroup(list(self.permutations), self.degree)


def parse_generator_file(text: str) -> GeneratorFile:
    """Parse the text format: comments, a "degree N [order Q]" header, one line per permutation."""
    degree: int | None = None
    expected_order: int | None = None
    name: str | None = None
    note: str | None = None
    perms: list[Permutation] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("name:"):
                name = body[len("name:") :].strip()
            elif body.startswith("note:"):
                note = body[len("note:") :].strip()
            continue
        if degree is None:
            fields = stripped.split()
            if len(fields) not in (2, 4) or fields[0] != "degree":
                raise IngestError(
                    'expected header "degree N [order Q]"', line=lineno, column=1
                )
            try:
                degree = int(fields[1])
            except ValueError:
                raise IngestError(f"bad degree {fields[1]!r}", line=lineno, column=1)
            if degree < 1:
                raise IngestError("degree must be positive", line=lineno, column=1)
            if len(fields) == 4:
                if fields[2] != "order":
                    raise IngestError(
                        'expected header "degree N order Q"', line=lineno, column=1
                    )
                try:
                    expected_order = int(fields[3])
                except ValueError:
                    raise IngestError(f"bad order {fields[3]!r}", line=lineno, column=1)
            continue
        perms.append(parse_permutation(raw, degree, line=lineno))
    if degree is None:
        raise IngestError("missing header line")
    return GeneratorFile(degree, tuple(perms), name, expected_order, note)


def write_generator_file(gf: GeneratorFile) -> str:
    """Render a GeneratorFile back to its text format."""
    lines = []
    if gf.name is not None:
        lines.append(f"# name: {gf.name}")
    if gf.note is not None:
        lines.append(f"# note: {gf.note}")
    header = f"degree {gf.degree}"
    if gf.expected_order is not None:
        header += f" order {gf.expected_order}"
    lines.append(header)
    lines.extend(permutation_to_cycles(p) for p in gf.permutations)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RegistryEntry:
    """One registry row: where a group's generators live and how it relates to others."""

    name: str
    path: Path
    degree: int
    role: str

    @property
    def parent(self) -> str | None:
        if self.role.startswith(SUBGROUP_ROLE_PREFIX):
            return self.role[len(SUBGROUP_ROLE_PREFIX) :]
        return None


class GroupRegistry:
    """Named groups and subgroups backed by generator files on disk."""

    def __init__(self, entries: dict[str, RegistryEntry]):
        self.entries = dict(entries)
        self._groups: dict[str, PermGroup] = {}
        self._files: dict[str, GeneratorFile] = {}

    @staticmethod
    def from_file(path: str | Path) -> "GroupRegistry":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise IngestError(f"registry file not found: {path}")
        except json.JSONDecodeError as exc:
            raise IngestError(f"registry is not valid JSON: {exc}")
        base = path.parent
        entries = {}
        for name, row in doc.items():
            if not isinstance(row, dict) or "path" not in row or "degree" not in row:
                raise IngestError(f"registry entry {name!r} needs 'path' and 'degree'")
            role = row.get("role", GROUP_ROLE)
            if role != GROUP_ROLE and not role.startswith(SUBGROUP_ROLE_PREFIX):
                raise IngestError(f"registry entry {name!r} has unknown role {role!r}")
            entries[name] = RegistryEntry(
                name, base / row["path"], int(row["degree"]), role
            )
        return GroupRegistry(entries)

    @staticmethod
    def default() -> "GroupRegistry":
        """Resolve the registry: the environment override, else the packaged one."""
        override = os.environ.get(REGISTRY_ENV_VAR)
        if override:
            return GroupRegistry.from_file(override)
        packaged = resources.files("designforge").joinpath("data/registry.json")
        return GroupRegistry.from_file(Path(str(packaged)))

    def names(self) -> list[str]:
        return sorted(self.entries)

    def entry(self, name: str) -> RegistryEntry:
        try:
            return self.entries[name]
        except KeyError:
            known = ", ".join(self.names()) or "none"
            raise IngestError(f"unknown group {name!r} (registry has: {known})")

    def generator_file(self, name: str) -> GeneratorFile:
        """Parse (and cache) the generator file behind a registry entry."""
        if name not in self._files:
            entry = self.entry(name)
            try:
                text = entry.path.read_text()
            except FileNotFoundError:
                raise IngestError(f"generator file missing for {name!r}: {entry.path}")
            gf = parse_generator_file(text)
            if gf.degree != entry.degree:
                raise IngestError(
                    f"registry says degree {entry.degree} but file {entry.path} has {gf.degree}"
                )
            self._files[name] = gf
        return self._files[name]

    def load_group(self, name: str, _loading: frozenset[str] = frozenset()) -> PermGroup:
        """Load, validate, and cache a group; subgroups are membership-checked."""
        if name in self._groups:
            return self._groups[name]
        if name in _loading:
            raise IngestError(f"registry role cycle through {name!r}")
        entry = self.entry(name)
        gf = self.generator_file(name)
        group = gf.group()
        if gf.expected_order is not None and group.order() != gf.expected_order:
            raise IngestError(
                f"corrupt fixture {name!r}: order {group.order()} != expected {gf.expected_order}"
            )
        parent_name = entry.parent
        if parent_name is not None:
            parent = self.load_group(parent_name, _loading | {name})
            if parent.degree != group.degree:
                raise IngestError(
                    f"subgroup {name!r} degree {group.degree} != parent degree {parent.degree}"
                )
            for i, g in enumerate(group.generators):
                if g not in parent:
                    raise IngestError(
                        f"generator {i + 1} of {name!r} fails membership in {parent_name!r}"
                    )
        self._groups[name] = group
        return group
