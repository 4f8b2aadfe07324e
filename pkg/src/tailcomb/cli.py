"""tailcomb command line.

Subcommands: combine, ratio, lambda, calibrate, power, tailscale, falsify,
serve.  combine/ratio/lambda accept --server URL to run against a tailcomb
service instead of in-process (the Monte Carlo subcommands always run
locally).  Exit codes: 0 success, 2 configuration error, 3 numerical
failure.  Option precedence: flags > --config file > defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__, angular, combiners, samplers
from .errors import ConfigurationError, TailcombError
from .experiments import (
    emit_csv,
    run_calibration,
    run_falsifier,
    run_power,
    run_tail_scale,
    save_report,
)
from .experiments.tailscale import closed_form_tail_constant

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# parsing helpers


def _split_items(text: str) -> List[str]:
    return [tok for tok in text.replace(",", " ").split() if tok]


def _parse_floats(text: str) -> List[float]:
    try:
        return [float(tok) for tok in _split_items(text)]
    except ValueError as exc:
        raise ConfigurationError(f"bad numeric list {text!r}: {exc}") from None


def _parse_effects(text: str) -> List[float]:
    """Either "start:stop:count" or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError("effects range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 2:
            raise ConfigurationError("effects range needs count >= 2")
        return list(np.linspace(start, stop, count))
    return _parse_floats(text)


def _read_vector_rows(path: str) -> List[List[float]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in _split_items(line)])
    if not rows:
        raise ConfigurationError(f"no vectors found in {path}")
    return rows


def _read_weights(path: str) -> List[float]:
    flat = [v for row in _read_vector_rows(path) for v in row]
    return flat


def _read_blocks(path: str) -> List[List[int]]:
    """One block per line, 1-based indices."""
    blocks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            blocks.append([int(tok) - 1 for tok in _split_items(line)])
    if not blocks:
        raise ConfigurationError(f"no blocks found in {path}")
    return blocks


def _parse_sigma_spec(text: str, d: int) -> tuple:
    if ":" not in text:
        raise ConfigurationError("sigma must look like ar:0.5 or exch:0.3")
    kind, _, rho = text.partition(":")
    if kind not in ("ar", "exch"):
        raise ConfigurationError(f"unknown sigma kind {kind!r}")
    rho_val = float(rho)
    return samplers.sigma_build(kind, rho=rho_val, d=d), kind, rho_val


def _parse_model(text: str) -> samplers.ModelSpec:
    """A model file path, or an inline preset like t:nu=1,d=10,sigma=ar:0.5."""
    name, sep, rest = text.partition(":")
    if name in ("t", "mvt", "gauss", "uniform") and (sep or name == "uniform"):
        params = {}
        for item in rest.split(",") if rest else []:
            if not item:
                continue
            key, _, value = item.partition("=")
            params[key] = value
        d = int(params.get("d", 10))
        sigma_text = params.get("sigma", "ar:0")
        if name == "uniform":
            sigma, kind, rho = np.eye(d), "ar", 0.0
        else:
            sigma, kind, rho = _parse_sigma_spec(sigma_text, d)
        if name in ("t", "mvt"):
            if "nu" not in params:
                raise ConfigurationError("t preset requires nu=")
            return samplers.MultivariateT(
                nu=float(params["nu"]), sigma=sigma, sigma_kind=kind, rho=rho
            )
        return samplers.GaussianCopula(sigma=sigma, sigma_kind=kind, rho=rho)
    return samplers.load_model(text)


def _parse_combiner(text: str, d: Optional[int]) -> combiners.CombinerSpec:
    """linear[:w,...] | tippett | powermean:G[:w,...] | maxlinear:B1|B2:w,...

    max-linear blocks are 1-based index groups separated by '|',
    e.g. maxlinear:1,2|3,4:0.5,0.5 with n_factors = d.
    """
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "linear":
        weights = _parse_floats(rest) if rest else _equal_weights(d, "linear")
        return combiners.linear(weights)
    if head == "tippett":
        return combiners.tippett()
    if head == "powermean":
        if not rest:
            raise ConfigurationError("powermean needs :gamma")
        gamma_text, _, w_text = rest.partition(":")
        weights = _parse_floats(w_text) if w_text else _equal_weights(d, "powermean")
        return combiners.power_mean(float(gamma_text), weights)
    if head == "maxlinear":
        if d is None:
            raise ConfigurationError("maxlinear requires a known dimension")
        blocks_text, _, w_text = rest.partition(":")
        if not blocks_text:
            raise ConfigurationError("maxlinear needs :blocks")
        blocks = [
            [int(tok) - 1 for tok in _split_items(group)]
            for group in blocks_text.split("|")
        ]
        weights = (
            _parse_floats(w_text) if w_text else [1.0 / len(blocks)] * len(blocks)
        )
        return combiners.max_linear(blocks, weights, d)
    raise ConfigurationError(f"unknown combiner {text!r}")


def _equal_weights(d: Optional[int], what: str) -> List[float]:
    if d is None:
        raise ConfigurationError(f"{what} weights required when dimension is unknown")
    return [1.0 / d] * d


def _build_tests(
    names: Sequence[str],
    d: int,
    weights: Optional[List[float]],
    gamma: Optional[float],
    blocks: Optional[List[List[int]]],
    block_weights: Optional[List[float]],
) -> List[combiners.TestSpec]:
    w = weights if weights is not None else [1.0 / d] * d
    tests = []
    for name in names:
        name = name.strip().lower()
        if name == "pct":
            tests.append(combiners.pct(w))
        elif name == "cct":
            tests.append(combiners.cct(w))
        elif name == "tippett":
            tests.append(combiners.tippett_test())
        elif name == "powermean":
            if gamma is None:
                raise ConfigurationError("powermean requires --gamma")
            tests.append(combiners.power_mean_test(gamma, w))
        elif name == "fct":
            if blocks is None:
                raise ConfigurationError("fct requires --blocks FILE")
            bw = block_weights if block_weights is not None else [1.0 / len(blocks)] * len(blocks)
            tests.append(combiners.fct(blocks, bw, d))
        else:
            raise ConfigurationError(f"unknown test {name!r}")
    if not tests:
        raise ConfigurationError("no tests requested")
    return tests


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return obj


def _resolve(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _fmt17(value: float) -> str:
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# subcommands


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    from .errors import NumericalError

    response = httpx.post(server.rstrip("/") + path, json=payload, timeout=120.0)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        if response.status_code == 422:
            raise ConfigurationError(f"server rejected request: {detail}")
        raise NumericalError(f"server error: {detail}")
    return response.json()


def _cmd_combine(args) -> int:
    rows = _read_vector_rows(args.pvalues)
    d = len(rows[0])
    if any(len(r) != d for r in rows):
        raise ConfigurationError("all p-value rows must have the same length")
    weights = _read_weights(args.weights) if args.weights else None
    blocks = _read_blocks(args.blocks) if args.blocks else None

    if args.server:
        payload = {
            "test": args.test,
            "pvalues": rows,
            "weights": weights,
            "gamma": args.gamma,
            "blocks": [[i + 1 for i in b] for b in blocks] if blocks else None,
        }
        combined = _post(args.server, "/combine", payload)["combined"]
    else:
        tests = _build_tests([args.test], d, weights, args.gamma, blocks, weights)
        combined = np.atleast_1d(combiners.combined_pvalue(tests[0], np.asarray(rows)))
    for value in combined:
        print(_fmt17(float(value)))
    return 0


def _cmd_ratio(args) -> int:
    if args.server:
        with open(args.measure, encoding="utf-8") as fh:
            measure_obj = json.load(fh)
        if args.beta is not None:
            measure_obj["beta"] = args.beta
        d = len(measure_obj["atoms"][0])
        combiner = _parse_combiner(args.combiner, d)
        payload = {
            "combiner": _combiner_payload(combiner),
            "measure": measure_obj,
        }
        result = _post(args.server, "/ratio", payload)
        print(f"{_fmt17(result['ratio'])} {result['classification']}")
        return 0
    measure = angular.load_measure(args.measure)
    if args.beta is not None:
        measure = angular.DiscreteAngularMeasure(
            beta=args.beta,
            atoms=measure.atoms,
            weights=measure.weights,
            signed=measure.signed,
        )
    combiner = _parse_combiner(args.combiner, measure.dim)
    value = angular.asymptotic_ratio(combiner, measure)
    bucket = angular.classify(combiner, measure)
    print(f"{_fmt17(value)} {bucket.value}")
    return 0


def _combiner_payload(spec: combiners.CombinerSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "weights": list(spec.weights) if spec.weights else None,
        "gamma": spec.gamma,
        "blocks": [[i + 1 for i in b] for b in spec.blocks] if spec.blocks else None,
        "n_factors": spec.n_factors,
    }


def _cmd_lambda(args) -> int:
    if args.server:
        result = _post(args.server, "/lambda", {"nu": args.nu, "rho": args.rho})
        print(_fmt17(result["lambda"]))
        return 0
    print(_fmt17(angular.t_copula_lambda(args.nu, args.rho)))
    return 0


def _cmd_calibrate(args) -> int:
    config = _load_config(args.config)
    model = _parse_model(_resolve(args.model, config, "model", None) or _fail("--model"))
    test_names = _resolve(args.tests, config, "tests", "pct,cct").split(",")
    alphas = _parse_floats(str(_resolve(args.alphas, config, "alphas", "1e-2,1e-3")))
    n = int(_resolve(args.n, config, "n", 1_000_000))
    seed = int(_resolve(args.seed, config, "seed", 42))
    workers = int(_resolve(args.workers, config, "workers", 1))
    weights = _read_weights(args.weights) if args.weights else None
    blocks = _read_blocks(args.blocks) if args.blocks else None
    block_weights = _read_weights(args.block_weights) if args.block_weights else None
    tests = _build_tests(test_names, model.d, weights, args.gamma, blocks, block_weights)
    records = run_calibration(model, tests, alphas, n, seed, workers=workers)
    emit_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_power(args) -> int:
    config = _load_config(args.config)
    preset = _resolve(args.preset, config, "preset", "t")
    if preset != "t":
        raise ConfigurationError("only the multivariate-t preset is supported")
    nu = float(_resolve(args.nu, config, "nu", 10.0))
    d = int(_resolve(args.d, config, "d", 10))
    sigma_text = _resolve(args.sigma, config, "sigma", "ar:0.5")
    sigma, kind, rho = _parse_sigma_spec(sigma_text, d)
    direction = _resolve(args.direction, config, "direction", "bottom")
    effects = _parse_effects(str(_resolve(args.effects, config, "effects", "0:40:21")))
    alpha = float(_resolve(args.alpha, config, "alpha", 0.05))
    n = int(_resolve(args.n, config, "n", 100_000))
    seed = int(_resolve(args.seed, config, "seed", 42))
    records = run_power(
        nu, sigma, direction, effects, alpha, n, seed, sigma_kind=kind, rho=rho
    )
    emit_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_tailscale(args) -> int:
    config = _load_config(args.config)
    model = _parse_model(_resolve(args.model, config, "model", None) or _fail("--model"))
    combiner = _parse_combiner(
        _resolve(args.combiner, config, "combiner", None) or _fail("--combiner"), model.d
    )
    thresholds = _parse_floats(str(_resolve(args.thresholds, config, "thresholds", "1e2,1e3,1e4")))
    n = int(_resolve(args.n, config, "n", 1_000_000))
    seed = int(_resolve(args.seed, config, "seed", 42))
    workers = int(_resolve(args.workers, config, "workers", 1))
    estimates = run_tail_scale(model, combiner, thresholds, n, seed, workers=workers)
    try:
        closed = closed_form_tail_constant(model, combiner)
        print(f"closed-form constant: {_fmt17(closed)}")
    except ConfigurationError:
        pass
    for est in estimates:
        print(
            f"t={est.threshold:g} estimate={_fmt17(est.estimate)} "
            f"se={_fmt17(est.se)} count={est.count}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("threshold,count,n,estimate,se\n")
            for est in estimates:
                fh.write(
                    f"{_fmt17(est.threshold)},{est.count},{est.n},"
                    f"{_fmt17(est.estimate)},{_fmt17(est.se)}\n"
                )
    return 0


def _cmd_falsify(args) -> int:
    config = _load_config(args.config)
    d = int(_resolve(args.d, config, "d", 2))
    combiner = _parse_combiner(
        _resolve(args.combiner, config, "combiner", None) or _fail("--combiner"), d
    )
    report = run_falsifier(
        combiner,
        d=d,
        beta=float(_resolve(args.beta, config, "beta", 1.0)),
        n_atoms=int(_resolve(args.atoms, config, "atoms", 8)),
        budget=int(_resolve(args.budget, config, "budget", 10_000)),
        seed=int(_resolve(args.seed, config, "seed", 0)),
    )
    if args.out:
        save_report(report, args.out)
        print(f"wrote report to {args.out}")
    else:
        print(json.dumps(report.to_json(), indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _fail(flag: str):
    raise ConfigurationError(f"{flag} is required")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailcomb", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tailcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("combine", help="combine p-value vectors from a file")
    p.add_argument("--test", required=True, choices=["pct", "cct", "tippett", "fct", "powermean"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--weights", help="file with coordinate (or block) weights")
    p.add_argument("--blocks", help="file with one 1-based block per line (fct)")
    p.add_argument("--pvalues", required=True, help="file with one p-value vector per line")
    p.add_argument("--server", help="tailcomb service URL (thin-client mode)")
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("ratio", help="closed-form calibration ratio of a combiner")
    p.add_argument("--combiner", required=True)
    p.add_argument("--measure", required=True, help="angular measure JSON file")
    p.add_argument("--beta", type=float, help="override the measure's tail index")
    p.add_argument("--server")
    p.set_defaults(func=_cmd_ratio)

    p = sub.add_parser("lambda", help="t-copula upper tail-dependence coefficient")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_lambda)

    p = sub.add_parser("calibrate", help="Monte Carlo type-I-error calibration")
    p.add_argument("--model", help="model JSON file or preset (t:nu=1,d=10,sigma=ar:0.5)")
    p.add_argument("--tests", help="comma list: pct,cct,tippett,powermean,fct")
    p.add_argument("--alphas")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--weights")
    p.add_argument("--blocks")
    p.add_argument("--block-weights", dest="block_weights")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("power", help="power study vs the LRT baseline")
    p.add_argument("--preset")
    p.add_argument("--nu", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--sigma")
    p.add_argument("--direction", choices=["top", "bottom"])
    p.add_argument("--effects", help="start:stop:count or comma list (must include 0)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("tailscale", help="MC estimates of t*P(h(X)>t)")
    p.add_argument("--model")
    p.add_argument("--combiner")
    p.add_argument("--thresholds")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tailscale)

    p = sub.add_parser("falsify", help="search for de-calibrating measures")
    p.add_argument("--combiner")
    p.add_argument("--d", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--atoms", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_falsify)

    p = sub.add_parser("serve", help="run the analytic HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TailcombError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
