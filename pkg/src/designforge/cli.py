"""Command-line front end: orbit partitions, design construction, tables, verification."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .designs import (
    Design,
    TDesignCertificate,
    design_from_json,
    design_from_maximal,
    design_from_orbit,
    design_to_json,
    merge_orbits,
    verify_t_design,
)
from .errors import (
    ConsistencyError,
    DesignforgeError,
    IngestError,
    InvalidPermutationError,
    ResourceLimitError,
    VerificationError,
)
from .ingest import GroupRegistry
from .orbits import (
    DEFAULT_ORBIT_CAP,
    DEFAULT_SUBSET_CAP,
    DEFAULT_WORK_CAP,
    orbit_partition,
)

EXIT_OK = 0
EXIT_CAP = 2
EXIT_UNVERIFIED = 3
EXIT_INPUT = 4


@dataclass(frozen=True)
class TableRow:
    """One emitted table row; fields mirror the printed column order."""

    max_label: str | None
    t: int
    v: int
    b: int
    r: int
    k: int
    lam: int

    def __post_init__(self):
        if self.b * self.k != self.v * self.r:
            raise ConsistencyError(
                f"row violates b*k = v*r: {self.b}*{self.k} != {self.v}*{self.r}"
            )


class _UsageError(Exception):
    """Raised instead of argparse's SystemExit so main can map it to exit 4."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise _UsageError(message)


def _print(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _registry(args) -> GroupRegistry:
    if args.registry is not None:
        return GroupRegistry.from_file(args.registry)
    return GroupRegistry.default()


def _maybe_timestamp(args) -> None:
    if args.timestamp:
        _print(f"# generated {datetime.now(timezone.utc).isoformat()}")


def _parse_k_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise _UsageError(f"expected A..B for --k-range, got {text!r}")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise _UsageError(f"expected integers in --k-range, got {text!r}") from None
    if a > b:
        raise _UsageError(f"empty --k-range {text!r}")
    return a, b


def _parse_orbit_selector(text: str) -> tuple[int, int]:
    k_text, sep, idx_text = text.partition(":")
    if not sep:
        raise _UsageError(f"expected K:INDEX for --orbit, got {text!r}")
    try:
        return int(k_text), int(idx_text)
    except ValueError:
        raise _UsageError(f"expected integers in --orbit, got {text!r}") from None


def _load_subgroup(registry: GroupRegistry, group_name: str, sub_name: str):
    entry = registry.entry(sub_name)
    if entry.parent != group_name:
        raise IngestError(
            f"{sub_name} is not registered as a maximal subgroup of {group_name}"
        )
    return registry.load_group(sub_name)


# ---------------------------------------------------------------------------
# subcommands


def cmd_sigma(args) -> int:
    registry = _registry(args)
    group = registry.load_group(args.group)
    partition = orbit_partition(
        group,
        args.k,
        max_subsets=args.cap_subsets,
        max_orbit=args.cap_orbit,
        max_work=args.cap_work,
        threads=args.threads,
        group_name=args.group,
    )
    _maybe_timestamp(args)
    if args.json:
        _print(partition.to_json())
    else:
        _print(partition.exponent_string())
    return EXIT_OK


def _certificate_doc(cert: TDesignCertificate) -> dict:
    return {
        "t": cert.t,
        "lambda_t": cert.lambda_t,
        "verified": cert.verified,
        "coverage_histogram": {str(key): val for key, val in sorted(cert.coverage_histogram.items())},
        "subsets_checked": cert.subsets_checked,
    }


def cmd_design(args) -> int:
    registry = _registry(args)
    group = registry.load_group(args.group)
    if args.orbit is not None:
        k, index = _parse_orbit_selector(args.orbit)
        partition = orbit_partition(
            group,
            k,
            max_subsets=args.cap_subsets,
            max_orbit=args.cap_orbit,
            max_work=args.cap_work,
            threads=args.threads,
            group_name=args.group,
        )
        if not 0 <= index < len(partition.orbits):
            raise IngestError(
                f"orbit index {index} out of range: Σ_{k} has {len(partition.orbits)} orbits"
            )
        design = design_from_orbit(group, partition.orbits[index], group_name=args.group)
    else:
        subgroup = _load_subgroup(registry, args.group, args.maximal)
        if args.merge is not None:
            try:
                indices = [int(part) for part in args.merge.split(",")]
            except ValueError:
                raise _UsageError(f"expected I,J,... for --merge, got {args.merge!r}") from None
            design = merge_orbits(
                group,
                subgroup,
                indices,
                group_name=args.group,
                subgroup_name=args.maximal,
                max_orbit=args.cap_orbit,
                max_work=args.cap_work,
            )
        else:
            design = design_from_maximal(
                group,
                subgroup,
                args.alpha - 1,
                group_name=args.group,
                subgroup_name=args.maximal,
                max_orbit=args.cap_orbit,
                max_work=args.cap_work,
            )

    cert = None
    if args.verify_t is not None:
        cert = verify_t_design(
            design,
            args.verify_t,
            max_work=args.cap_work,
            max_orbit=args.cap_orbit,
            threads=args.threads,
        )
    doc = json.loads(design_to_json(design, cert, include_blocks=args.blocks))
    if cert is not None:
        doc["certificate"] = _certificate_doc(cert)
    _maybe_timestamp(args)
    _print(json.dumps(doc, indent=2, sort_keys=True))
    if cert is not None and not cert.verified:
        return EXIT_UNVERIFIED
    return EXIT_OK


def _render_rows(rows: list[TableRow], skips: list[str], fmt: str, with_label: bool) -> None:
    if fmt == "csv":
        header = "max,t,v,b,r,k,lambda" if with_label else "t,v,b,r,k,lambda"
        _print(header)
        for row in rows:
            cells = [row.max_label or ""] if with_label else []
            cells += [str(x) for x in (row.t, row.v, row.b, row.r, row.k, row.lam)]
            _print(",".join(cells))
    else:
        header = ["max"] if with_label else []
        header += ["t", "v", "b", "r", "k", "lambda"]
        _print("| " + " | ".join(header) + " |")
        _print("|" + "|".join("---" for _ in header) + "|")
        for row in rows:
            cells = [row.max_label or ""] if with_label else []
            cells += [str(x) for x in (row.t, row.v, row.b, row.r, row.k, row.lam)]
            _print("| " + " | ".join(cells) + " |")
    for line in skips:
        _print(f"# skipped {line}")


def cmd_table(args) -> int:
    registry = _registry(args)
    group = registry.load_group(args.group)
    v = group.degree
    rows: list[TableRow] = []
    skips: list[str] = []

    def push(label: str | None, design: Design, what: str, *, skip_complete: bool) -> None:
        if skip_complete and (design.degenerate or design.b == math.comb(design.v, design.k)):
            skips.append(f"{what}: complete or degenerate design")
            return
        try:
            cert = verify_t_design(
                design,
                args.t,
                max_work=args.cap_work,
                max_orbit=args.cap_orbit,
                threads=args.threads,
            )
        except (ResourceLimitError, ValueError) as exc:
            skips.append(f"{what}: {exc}")
            return
        if not cert.verified:
            skips.append(f"{what}: coverage not constant at t={args.t}")
            return
        rows.append(TableRow(label, args.t, v, design.b, design.r, design.k, cert.lambda_t))

    if args.k_range is not None:
        lo, hi = _parse_k_range(args.k_range)
        for k in range(lo, hi + 1):
            try:
                partition = orbit_partition(
                    group,
                    k,
                    max_subsets=args.cap_subsets,
                    max_orbit=args.cap_orbit,
                    max_work=args.cap_work,
                    threads=args.threads,
                    group_name=args.group,
                )
            except ResourceLimitError as exc:
                skips.append(f"k={k}: {exc}")
                continue
            for index, orbit in enumerate(partition.orbits):
                try:
                    design = design_from_orbit(group, orbit, group_name=args.group)
                except (ConsistencyError, ValueError) as exc:
                    skips.append(f"k={k} orbit {index}: {exc}")
                    continue
                push(None, design, f"k={k} orbit {index}", skip_complete=False)
        with_label = False
    else:
        labels = sorted(
            name for name in registry.names()
            if registry.entry(name).parent == args.group
        )
        if not labels:
            raise IngestError(f"no maximal subgroups of {args.group} in the registry")
        for label in labels:
            subgroup = registry.load_group(label)
            for index, suborbit in enumerate(subgroup.orbits()):
                what = f"{label} orbit {index}"
                try:
                    design = design_from_maximal(
                        group,
                        subgroup,
                        min(suborbit),
                        group_name=args.group,
                        subgroup_name=label,
                        max_orbit=args.cap_orbit,
                        max_work=args.cap_work,
                    )
                except (ConsistencyError, ValueError) as exc:
                    skips.append(f"{what}: {exc}")
                    continue
                except ResourceLimitError as exc:
                    skips.append(f"{what}: {exc}")
                    continue
                push(label, design, what, skip_complete=True)
        with_label = True

    deduped: list[TableRow] = []
    seen = set()
    for row in sorted(rows, key=lambda r: (r.k, r.b, r.max_label or "")):
        key = (row.max_label, row.t, row.v, row.b, row.r, row.k, row.lam)
        if key not in seen:
            seen.add(key)
            deduped.append(row)
    _maybe_timestamp(args)
    _render_rows(deduped, skips, args.format, with_label)
    return EXIT_OK


def cmd_verify(args) -> int:
    registry = _registry(args)
    text = Path(args.file).read_text()
    resolver: Callable = registry.load_group
    design, stored_t, stored_lambda = design_from_json(text, group_resolver=resolver)
    t = args.t if args.t is not None else stored_t
    if t is None:
        raise IngestError("design document records no t; pass --t")
    cert = verify_t_design(
        design,
        t,
        max_work=args.cap_work,
        max_orbit=args.cap_orbit,
        threads=args.threads,
    )
    doc = _certificate_doc(cert)
    if stored_lambda is not None and args.t is None:
        doc["matches_document"] = cert.verified and cert.lambda_t == stored_lambda
    _maybe_timestamp(args)
    _print(json.dumps(doc, indent=2, sort_keys=True))
    if not cert.verified:
        return EXIT_UNVERIFIED
    if doc.get("matches_document") is False:
        return EXIT_UNVERIFIED
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(
        prog="designforge",
        description="Construct and verify block-transitive t-designs from group actions.",
    )
    common = _Parser(add_help=False)
    common.add_argument("--registry", help="path to a registry JSON (default: packaged)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cap-subsets", type=int, default=DEFAULT_SUBSET_CAP)
    common.add_argument("--cap-orbit", type=int, default=DEFAULT_ORBIT_CAP)
    common.add_argument("--cap-work", type=int, default=DEFAULT_WORK_CAP)
    common.add_argument("--timestamp", action="store_true",
                        help="prefix output with a generation timestamp")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sigma = sub.add_parser("sigma", help="orbit partition of k-subsets", parents=[common])
    p_sigma.add_argument("group")
    p_sigma.add_argument("k", type=int)
    p_sigma.add_argument("--json", action="store_true")
    p_sigma.set_defaults(func=cmd_sigma)

    p_design = sub.add_parser("design", help="construct one design and optionally verify it",
                               parents=[common])
    p_design.add_argument("group")
    sel = p_design.add_mutually_exclusive_group(required=True)
    sel.add_argument("--orbit", metavar="K:INDEX",
                     help="k and 0-based orbit index into the Σ_k partition")
    sel.add_argument("--maximal", metavar="SUBGROUP",
                     help="registered maximal subgroup supplying the block")
    p_design.add_argument("--alpha", type=int, default=1,
                          help="1-based base point for --maximal (default 1)")
    p_design.add_argument("--merge", metavar="I,J,...",
                          help="0-based suborbit indices to merge for --maximal")
    p_design.add_argument("--verify-t", type=int, dest="verify_t")
    p_design.add_argument("--blocks", action="store_true",
                          help="include the full block list in the JSON output")
    p_design.set_defaults(func=cmd_design)

    p_table = sub.add_parser("table", help="emit a design table", parents=[common])
    p_table.add_argument("group")
    mode = p_table.add_mutually_exclusive_group(required=True)
    mode.add_argument("--k-range", metavar="A..B")
    mode.add_argument("--maximals", action="store_true")
    p_table.add_argument("--t", type=int, default=2,
                         help="verification level for the lambda column (default 2)")
    p_table.add_argument("--format", choices=("md", "csv"), default="md")
    p_table.set_defaults(func=cmd_table)

    p_verify = sub.add_parser("verify", help="re-certify a design JSON document",
                               parents=[common])
    p_verify.add_argument("file")
    p_verify.add_argument("--t", type=int,
                          help="override the t level recorded in the document")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "design" and args.merge is not None and args.orbit is not None:
            raise _UsageError("--merge requires --maximal")
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    except (IngestError, ConsistencyError, InvalidPermutationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
