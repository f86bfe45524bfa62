"""Command-line front end.

Four commands:

  price    price one product spec (JSON file) with a chosen engine
  verify   run the cross-engine agreement suite (default scenarios or a file)
  reduce   quotient a covariance + homogeneous payoff and certify the result
  curve    tabulate Vasicek bond prices and bond volatilities by maturity

Exit codes: 0 success, 2 invalid input (one violation per line on stderr),
3 numerical failure, 64 unknown command.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import ratecurve
from .errors import PricingError, ValidationFailure
from .model import (
    AssetDynamics,
    CovarianceMatrix,
    HomogeneousPayoff,
    MultiAssetProblem,
    PriceQuote,
    covariance_from_loadings,
    product_from_dict,
    product_to_dict,
    quote_to_dict,
    validate,
)
from .montecarlo import McSpec
from .numeraire import certify_psd, reduce as reduce_problem
from .pde import GridSpec
from .verify import (
    ALL_METHODS,
    build_engines,
    price_with_method,
    run_suite,
    suite_to_csv,
    suite_to_json,
)

_USAGE = """usage: numerkit <command> [options]

commands:
  price    --input SPEC.json [--method M] [--format json|csv] [--output PATH]
           [--seed N] [--paths N] [--grid-nodes N] [--time-steps N]
  verify   [--input SPEC.json] [--tol X] [--format json|csv] [--output PATH]
           [--seed N] [--paths N] [--grid-nodes N] [--time-steps N]
  reduce   --input PROBLEM.json [--format json|csv] [--output PATH]
  curve    --input CURVE.json [--format json|csv] [--output PATH]
"""


def _parser(command: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"numerkit {command}", add_help=True)
    p.add_argument("--input", default=None)
    p.add_argument("--method", default="analytic", choices=list(ALL_METHODS))
    p.add_argument("--output", default=None)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--grid-nodes", type=int, default=400)
    p.add_argument("--time-steps", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-3)
    return p


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_json(path: Optional[str]) -> dict:
    if path is None:
        raise ValueError("--input is required for this command")
    with open(path) as fh:
        return json.load(fh)


def _quote_csv(label: str, quote: PriceQuote) -> str:
    std = "" if quote.std_error is None else "%.17g" % quote.std_error
    seed = "" if quote.seed is None else str(quote.seed)
    return ("product,method,value,std_error,seed\n"
            "%s,%s,%.17g,%s,%s\n" % (label, quote.method, quote.value, std, seed))


def _cmd_price(args) -> int:
    product = product_from_dict(_load_json(args.input))
    violations = validate(product)
    if violations:
        raise ValidationFailure(violations)
    grid = GridSpec(nodes_per_axis=args.grid_nodes, time_steps=args.time_steps)
    mc = McSpec(paths=args.paths, seed=args.seed)
    quote = price_with_method(product, args.method, grid=grid, mc=mc)
    label = build_engines(product)[0].label
    if args.format == "csv":
        _emit(_quote_csv(label, quote), args.output)
    else:
        payload = {"product": product_to_dict(product),
                   "quote": quote_to_dict(quote)}
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_verify(args) -> int:
    products = None
    if args.input is not None:
        product = product_from_dict(_load_json(args.input))
        violations = validate(product)
        if violations:
            raise ValidationFailure(violations)
        products = [product]
    grid = GridSpec(nodes_per_axis=args.grid_nodes, time_steps=args.time_steps)
    mc = McSpec(paths=args.paths, seed=args.seed)
    suite = run_suite(products, grid=grid, mc=mc, tol=args.tol)
    if args.format == "csv":
        _emit(suite_to_csv(suite), args.output)
    else:
        _emit(suite_to_json(suite), args.output)
    return 0 if suite["all_passed"] else 3


_PAYOFF_KINDS = ("exchange", "relative_call", "forward", "max")


def _registry_payoff(cfg: dict, dim: int) -> HomogeneousPayoff:
    """Homogeneous payoffs addressable from JSON input.

    exchange:       max(S_i - S_j, 0)
    relative_call:  max(S_i - k S_0, 0)
    forward:        S_i - k S_0
    max:            max_i S_i
    """
    kind = cfg.get("kind")
    if kind not in _PAYOFF_KINDS:
        raise ValueError(f"payoff kind must be one of {_PAYOFF_KINDS}")
    i = int(cfg.get("asset", 1))
    j = int(cfg.get("against", 0))
    k = float(cfg.get("strike_ratio", 1.0))
    for idx, name in ((i, "asset"), (j, "against")):
        if not 0 <= idx < dim:
            raise ValueError(f"{name} index {idx} out of range for {dim} assets")
    if kind == "exchange":
        fn = lambda s: max(float(s[i]) - float(s[j]), 0.0)
    elif kind == "relative_call":
        fn = lambda s: max(float(s[i]) - k * float(s[0]), 0.0)
    elif kind == "forward":
        fn = lambda s: float(s[i]) - k * float(s[0])
    else:
        fn = lambda s: float(np.max(s))
    return HomogeneousPayoff(evaluate=fn, name=kind)


def _cmd_reduce(args) -> int:
    cfg = _load_json(args.input)
    if "loadings" in cfg:
        rows = cfg["loadings"]
        spots = cfg.get("spots", [1.0] * len(rows))
        if len(spots) != len(rows):
            raise ValueError("spots and loadings must have the same length")
        assets = tuple(AssetDynamics(spot=float(s), loadings=tuple(row))
                       for s, row in zip(spots, rows))
        cov = covariance_from_loadings(assets)
    elif "covariance" in cfg:
        cov = CovarianceMatrix(np.asarray(cfg["covariance"], dtype=float))
        spots = cfg.get("spots", [1.0] * cov.dim)
        if len(spots) != cov.dim:
            raise ValueError("spots must match the covariance dimension")
        width = cov.dim
        assets = tuple(AssetDynamics(spot=float(s), loadings=(0.0,) * width)
                       for s in spots)
    else:
        raise ValueError("input must provide 'covariance' or 'loadings'")
    maturity = float(cfg.get("maturity", 1.0))
    payoff = _registry_payoff(cfg.get("payoff", {}), cov.dim)
    problem = MultiAssetProblem(
        assets=assets,
        covariance=cov,
        payoff=payoff,
        maturity=maturity,
    )
    reduced = reduce_problem(problem)
    psd = certify_psd(reduced.b_matrix)
    payload = {
        "dim": reduced.dim,
        "b_matrix": [list(map(float, row)) for row in reduced.b_matrix],
        "psd": bool(psd),
        "maturity": reduced.maturity,
    }
    if args.format == "csv":
        lines = ["i,j,b"]
        for a in range(reduced.dim):
            for b in range(reduced.dim):
                lines.append("%d,%d,%.17g" % (a, b, reduced.b_matrix[a, b]))
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_curve(args) -> int:
    cfg = _load_json(args.input)
    vs = cfg.get("vasicek")
    if vs is None:
        raise ValueError("input must provide a 'vasicek' block")
    model = ratecurve.VasicekModel(
        theta=float(vs["theta"]), mu_r=float(vs["mu_r"]),
        sigma_r=float(vs["sigma_r"]), lam=float(vs.get("lambda", 0.0)),
        r0=float(vs.get("r0", 0.0)))
    maturities = [float(m) for m in cfg.get("maturities", [1.0, 2.0, 5.0, 10.0])]
    if any(m <= 0.0 for m in maturities):
        raise ValueError("maturities must be positive")
    rows = []
    for m in maturities:
        rows.append({
            "maturity": m,
            "bond_price": ratecurve.bond_price(model, model.r0, 0.0, m),
            "sigma_p": ratecurve.sigma_p(model, 0.0, m),
        })
    if args.format == "csv":
        lines = ["maturity,bond_price,sigma_p"]
        for row in rows:
            lines.append("%.17g,%.17g,%.17g" % (
                row["maturity"], row["bond_price"], row["sigma_p"]))
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(json.dumps({"curve": rows}, indent=2) + "\n", args.output)
    return 0


_COMMANDS = {
    "price": _cmd_price,
    "verify": _cmd_verify,
    "reduce": _cmd_reduce,
    "curve": _cmd_curve,
}


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help"):
        sys.stdout.write(_USAGE)
        return 0
    if not argv or argv[0] not in _COMMANDS:
        sys.stderr.write(_USAGE)
        return 64
    command, rest = argv[0], argv[1:]
    try:
        args = _parser(command).parse_args(rest)
    except SystemExit as exc:
        # argparse already printed its message (help exits 0)
        return 0 if exc.code == 0 else 2
    try:
        return _COMMANDS[command](args)
    except ValidationFailure as exc:
        for violation in exc.violations:
            sys.stderr.write(violation + "\n")
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except PricingError as exc:
        sys.stderr.write(f"{exc}\n")
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
