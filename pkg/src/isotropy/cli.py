"""``isotropy`` command line: normal forms, centralizer dimension/samples/generators, verification.

Exit codes: 0 ok, 1 verification failure, 2 unreadable or invalid input,
3 domain precondition violated, 4 size limit exceeded (see ``ISOTROPY_MAX_N``).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .commutant import StructureError
from .engine import (
    CentralizerModel,
    assemble_mixed,
    build_centralizer,
    centralizer_dimension,
    dimension_variants,
)
from .errors import DomainError, ResourceLimitError, SpecError
from .normal_forms import build_mixed_normal_form, bundle_for
from .oracle import ENV_MAX_N, lie_algebra_dimension, max_size_from_env, verify_model
from .shapes import ShapeSpec, load_spec_document

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2, 3, 4


def _dump(obj, compact: bool) -> str:
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return json.dumps(obj, sort_keys=True, indent=2)


def _load(path: str) -> list[ShapeSpec]:
    specs = load_spec_document(path)
    limit = max_size_from_env()
    total = sum(s.n for s in specs)
    if total > limit:
        raise ResourceLimitError(f"matrix size n={total} exceeds the limit {limit} (set {ENV_MAX_N} to raise it)")
    return specs


def _model(specs: list[ShapeSpec]) -> CentralizerModel:
    return assemble_mixed([build_centralizer(s) for s in specs])


def cmd_normal_form(args) -> int:
    specs = _load(args.spec)
    bundle = bundle_for(specs[0]) if len(specs) == 1 else build_mixed_normal_form(specs)
    print(_dump(bundle.to_json(), args.json))
    return EXIT_OK


def cmd_centralizer(args) -> int:
    specs = _load(args.spec)
    if args.action == "dim":
        parts = []
        for s in specs:
            b = bundle_for(s)
            oracle = lie_algebra_dimension(b.A, b.H)
            variants = dimension_variants(s)
            parts.append({
                "spec": s.to_json(),
                "dimension": centralizer_dimension(s),
                "oracle": oracle,
                "variants": variants,
                "matching_variants": sorted(k for k, v in variants.items() if v == oracle),
            })
        out = {"dimension": sum(p["dimension"] for p in parts), "parts": parts}
    elif args.action == "sample":
        model = _model(specs)
        drawn = model.samples(args.seed, args.count)
        rows = []
        for s in drawn:
            row = {"Q": s.Q.to_json(), "params": s.params}
            if args.emit_params and s.toeplitz is not None:
                row["toeplitz"] = s.toeplitz.to_json()
            rows.append(row)
        out = {"seed": args.seed, "count": args.count, "specs": [s.to_json() for s in specs], "samples": rows}
        if args.emit_params:
            out["Psi"] = model.psi.to_json()
    else:
        model = _model(specs)
        out = {"seed": args.seed, "specs": [s.to_json() for s in specs], "generators": model.generators(args.seed)}
    print(_dump(out, args.json))
    return EXIT_OK


def cmd_verify(args) -> int:
    specs = _load(args.spec)
    model = _model(specs)
    report = verify_model(model, model.bundle, samples=args.samples, seed=args.seed, corrupt=args.corrupt)
    print(_dump(report.to_json(), args.json))
    if not args.json:
        print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isotropy", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, metavar="PATH", help="JSON shape spec (or {\"parts\": [...]})")
    common.add_argument("--json", action="store_true", help="compact single-line JSON, no summary")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=0)

    sub = parser.add_subparsers(dest="command", required=True)
    nf = sub.add_parser("normal-form", parents=[common], help="emit A, H, R, U, J, Psi")
    nf.set_defaults(func=cmd_normal_form)

    cz = sub.add_parser("centralizer", help="dimension, samples or generators")
    cz_sub = cz.add_subparsers(dest="action", required=True)
    for action, helptext in (("dim", "oracle-confirmed dimension"),
                             ("sample", "seeded centralizer elements with their parameters"),
                             ("generators", "seeded unipotent and diagonal generators")):
        p = cz_sub.add_parser(action, parents=[common, seeded], help=helptext)
        p.set_defaults(func=cmd_centralizer, action=action)
        if action == "sample":
            p.add_argument("--count", type=int, default=1)
            p.add_argument("--emit-params", action="store_true",
                           help="also emit the model-coordinate element and Psi")

    vf = sub.add_parser("verify", parents=[common, seeded], help="check samples against the oracle")
    vf.add_argument("--samples", type=int, default=50)
    vf.add_argument("--corrupt", action="store_true", help="perturb one entry of the first sample (must fail)")
    vf.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
