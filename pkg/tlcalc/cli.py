"""
Command-line front end

    python -m tlcalc eval "cup ; cap" --dim 5
    python -m tlcalc normalize "proj ; proj" --dim 3
    python -m tlcalc verify all --dim 2 --seed 1
    python -m tlcalc demo teleport --dim 3

Results go to standard output as JSON; logging goes to standard error.
Exit codes: 0 every check passed, 1 a check failed, 2 bad input, 3 problem
too large.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .config import get_settings
from .diagram.diagram import Diagram
from .diagram.registry import OperatorRegistry, standard_registry
from .dsl.elaborator import compile_expression
from .errors import ProblemTooLargeError, TLCalcError
from .models import IdentityReport
from .numeric.evaluator import evaluate
from .protocols.catalog import verify_all, verify_identity
from .protocols.verifiers import densecode_message_verify, swap_verify, teleport_verify
from .rewrite.normalizer import normalize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_TOO_LARGE = 3

DEMO_PROTOCOLS = ("teleport", "densecode", "swap")


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2))


def _read_expression(source: str) -> str:
    """An expression given inline, or the contents of a file of that name"""
    path = Path(source)
    try:
        is_file = bool(path.suffix) and path.is_file()
    except OSError:
        is_file = False
    if is_file:
        logger.debug(f"Reading expression from {path}")
        return path.read_text()
    return source


def _registry(d: int, path: Optional[str]) -> OperatorRegistry:
    registry = standard_registry(d)
    if path:
        registry = OperatorRegistry.from_json(path, base=registry)
    return registry


def _as_diagram(expression: str) -> Diagram:
    diagram = compile_expression(expression)
    if not isinstance(diagram, Diagram):
        raise TLCalcError("Expected a single diagram, not a sum")
    return diagram


def cmd_eval(args) -> int:
    registry = _registry(args.dim, args.registry)
    diagram = compile_expression(_read_expression(args.expression))
    result = evaluate(diagram, args.dim, registry)
    logger.info(f"Evaluated a {result.upper_arity}->{result.lower_arity} diagram at d={args.dim}")
    _emit(result.to_dict())
    return EXIT_OK


def cmd_normalize(args) -> int:
    registry = _registry(args.dim, args.registry)
    diagram = _as_diagram(_read_expression(args.expression))
    final, trace = normalize(diagram, registry, args.dim, order_seed=args.order_seed)
    logger.info(f"Normal form reached in {len(trace.steps)} steps")
    payload = trace.to_dict()
    payload["normal_form"] = str(final)
    _emit(payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    settings = get_settings()
    if args.identity == "all":
        dimensions = [args.dim] if args.dim else settings.dimensions
        seeds = [args.seed] if args.seed is not None else None
        reports = verify_all(dimensions, seeds, workers=args.workers)
    else:
        reports = [verify_identity(args.identity, args.dim or 2, args.seed)]
    failed = [r for r in reports if not r.passed]
    for r in failed:
        logger.warning(f"{r.identity_id} failed at d={r.d}, seed={r.seed}: residual {r.residual:.3e}")
    logger.info(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    _emit([r.to_dict() for r in reports])
    return EXIT_FAILED if failed else EXIT_OK


def run_demo(protocol: str, d: int, seed: int = 0) -> Dict[str, Any]:
    """
    Run one protocol across all of its outcomes, narrating as it goes

    Returns:
        {protocol, d, steps, residuals, passed}
    """
    steps: List[str] = []
    reports: Dict[str, IdentityReport] = {}

    def narrate(message: str) -> None:
        logger.info(message)
        steps.append(message)

    if protocol == "teleport":
        narrate(f"Alice holds |psi> (seed {seed}) on C and shares omega on A,B with Bob; d={d}")
        for n in range(1, d * d + 1):
            reports[str(n)] = teleport_verify(d, n, seed)
            narrate(f"Outcome {n}: Bob receives U{n}^dag|psi>/d and undoes it with U{n}")
    elif protocol == "densecode":
        narrate(f"Alice encodes one of {d * d} messages by applying U_n to her half of omega; d={d}")
        for n in range(1, d * d + 1):
            reports[str(n)] = densecode_message_verify(d, n)
            narrate(f"Message {n}: Bob's Bell measurement returns {n} with probability 1")
    elif protocol == "swap":
        narrate(f"Two entangled pairs a,b and c,d; a Bell measurement on b,c; d={d}")
        if d == 2:
            triples = [(l, n, m) for l in range(1, 5) for n in range(1, 5) for m in range(1, 5)]
        else:
            rng = np.random.default_rng(seed)
            triples = [tuple(int(x) for x in rng.integers(1, d * d + 1, size=3)) for _ in range(20)]
        for l, n, m in triples:
            reports[f"{l},{n},{m}"] = swap_verify(d, l, n, m)
            narrate(f"Pairs {l},{m} with outcome {n}: a,d end up in U{l} U{n}* U{m} applied to omega")
    else:
        raise TLCalcError(f"Unknown demo {protocol!r}; choose from {', '.join(DEMO_PROTOCOLS)}")

    passed = all(r.passed for r in reports.values())
    narrate(f"{protocol}: {'all outcomes check out' if passed else 'some outcomes FAILED'}")
    return {
        "protocol": protocol,
        "d": d,
        "steps": steps,
        "residuals": {key: r.residual for key, r in reports.items()},
        "passed": passed,
    }


def cmd_demo(args) -> int:
    result = run_demo(args.protocol, args.dim, args.seed)
    _emit(result)
    return EXIT_OK if result["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlcalc", description="Extended Temperley-Lieb diagram calculus")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="Evaluate an expression (or a file holding one) to its matrix")
    p_eval.add_argument("expression")
    p_eval.add_argument("--dim", type=int, required=True)
    p_eval.add_argument("--registry", help="JSON file with extra matrices and vectors")
    p_eval.set_defaults(handler=cmd_eval)

    p_norm = sub.add_parser("normalize", help="Rewrite an expression to normal form and print the trace")
    p_norm.add_argument("expression")
    p_norm.add_argument("--dim", type=int, default=2)
    p_norm.add_argument("--registry")
    p_norm.add_argument("--order-seed", type=int, help="Apply the rules in a random legal order")
    p_norm.set_defaults(handler=cmd_normalize)

    p_verify = sub.add_parser("verify", help="Check a catalog identity, or all of them")
    p_verify.add_argument("identity", help="Identity id or 'all'")
    p_verify.add_argument("--dim", type=int)
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--workers", type=int)
    p_verify.set_defaults(handler=cmd_verify)

    p_demo = sub.add_parser("demo", help="Narrated run of a protocol")
    p_demo.add_argument("protocol", choices=DEMO_PROTOCOLS)
    p_demo.add_argument("--dim", type=int, default=2)
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.set_defaults(handler=cmd_demo)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns the exit code"""
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        logging.basicConfig(level=settings.log_level.upper(), stream=sys.stderr,
                            format="%(asctime)s %(name)s %(levelname)s %(message)s")
        logger.info(f"Running {args.command}")
        return args.handler(args)
    except ProblemTooLargeError as e:
        logger.error(str(e))
        _emit({"error": str(e), "type": type(e).__name__})
        return EXIT_TOO_LARGE
    except TLCalcError as e:
        logger.error(str(e))
        _emit({"error": str(e), "type": type(e).__name__})
        return EXIT_BAD_INPUT
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}")
        _emit({"error": str(e), "type": type(e).__name__})
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
