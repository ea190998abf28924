"""Command-line surface: fixture generation, estimation runs, inequality
verification sweeps, polynomial dumps, and query-scaling benchmarks.

Exit codes: 0 success, 2 input validation, 3 schedule budget or polynomial
certification failure, 4 verification-suite failure.  All commands are
deterministic per seed; reports embed a timestamp that honors the
SOURCE_DATE_EPOCH convention so byte-identical reruns are possible.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import estimation as est
from . import numerics as nm
from . import polyapprox as pa
from . import transform as tf
from .encodings import purification_of
from .fixtures import (floored_spectrum_state, ginibre_state, haar_unitary,
                       named_fixture, shared_support_pair)
from .numerics import ValidationError

STATE_FORMAT = "blockenc-state-v1"
REPORT_FORMAT = "blockenc-report-v1"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4


# ---------------------------------------------------------------------------
# Serialization: complex entries as [re, im] pairs, matrices row-major
# ---------------------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return datetime.datetime.fromtimestamp(t, datetime.timezone.utc).isoformat()


def _dump(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def state_payload(matrix: np.ndarray, kind: str = "explicit-matrix",
                  payload: dict | None = None, rank: int | None = None) -> dict:
    matrix = np.asarray(matrix, dtype=complex)
    return {"format": STATE_FORMAT, "kind": kind,
            "dimension": int(matrix.shape[0]),
            "rank": int(rank if rank is not None else nm.operator_rank(matrix)),
            "payload": payload or {},
            "matrix": matrix_to_json(matrix)}


def load_state(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != STATE_FORMAT:
        raise ValidationError(f"{path}: not a {STATE_FORMAT} file")
    kind = doc.get("kind", "explicit-matrix")
    if kind == "explicit-matrix":
        matrix = matrix_from_json(doc["matrix"])
    elif kind == "named-fixture":
        matrix = np.asarray(named_fixture(doc["payload"]["name"]), dtype=complex)
    elif kind == "spectrum-with-seed":
        spectrum = np.asarray(doc["payload"]["spectrum"], dtype=float)
        rng = np.random.default_rng(int(doc["payload"]["seed"]))
        basis = haar_unitary(int(doc["dimension"]), rng)[:, : spectrum.size]
        matrix = (basis * spectrum) @ basis.conj().T
    elif kind == "probability-vector":
        matrix = np.diag(np.asarray(doc["payload"]["probabilities"],
                                    dtype=float)).astype(complex)
    else:
        raise ValidationError(f"unknown state kind {kind!r}")
    doc["matrix_array"] = matrix
    # deserialized operator must pass the state invariants
    from .encodings import SubnormalizedDensityOperator
    SubnormalizedDensityOperator.from_matrix(matrix)
    return doc


def _oracle_from_state(doc: dict, label: str):
    if doc.get("kind") == "probability-vector":
        return est.distribution_to_purified_oracle(
            np.asarray(doc["payload"]["probabilities"], dtype=float), label=label)
    return purification_of(doc["matrix_array"], label=label)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_gen_state(args) -> int:
    if args.rank > args.dim:
        raise ValidationError("rank cannot exceed the dimension")
    if args.dim > nm.dimension_cap():
        raise ValidationError("dimension exceeds the cap")
    rng = np.random.default_rng(args.seed)
    rho = ginibre_state(args.dim, args.rank, rng)
    _dump(state_payload(rho, payload={"seed": args.seed, "ensemble": "ginibre"},
                        rank=args.rank), args.out)
    return EXIT_OK


QUANTITIES = ("von-neumann", "renyi", "tsallis", "trace-power", "rank",
              "exact-rank", "max-entropy", "trace-distance", "fidelity")


def _run_estimate(args) -> est.EstimateReport:
    doc = load_state(args.state)
    oracle = _oracle_from_state(doc, "rho")
    config = est.AmplitudeEstimatorConfig(mode=args.ae_mode, seed=args.seed)
    r = args.rank_bound if args.rank_bound else doc["rank"]
    q = args.quantity
    if q in ("trace-distance", "fidelity"):
        if not args.state2:
            raise ValidationError(f"{q} needs --state2")
        doc2 = load_state(args.state2)
        sigma = _oracle_from_state(doc2, "sigma")
        r = max(r, doc2["rank"]) if q == "trace-distance" else min(r, doc2["rank"])
        if q == "trace-distance":
            return est.estimate_trace_distance(oracle, sigma,
                                               args.alpha if args.alpha else 1.0,
                                               r, args.epsilon, config)
        if args.alpha is None:
            raise ValidationError("fidelity needs --alpha in (0, 1)")
        return est.estimate_fidelity(oracle, sigma, args.alpha, r,
                                     args.epsilon, config)
    if q == "von-neumann":
        return est.estimate_von_neumann(oracle, r, args.epsilon, config)
    if q == "renyi":
        return est.estimate_renyi(oracle, args.alpha, r, args.epsilon, config,
                                  kappa=args.kappa)
    if q == "tsallis":
        return est.estimate_tsallis(oracle, args.alpha, r, args.epsilon, config,
                                    kappa=args.kappa)
    if q == "trace-power":
        return est.estimate_trace_power(oracle, args.alpha, r, args.epsilon, config)
    if q == "rank":
        return est.estimate_rank(oracle, args.delta, args.epsilon,
                                 args.epsilon_prime, config)
    if q == "exact-rank":
        if args.kappa is None:
            raise ValidationError("exact-rank needs --kappa")
        rank = est.estimate_exact_rank(oracle, args.kappa, config)
        return est.EstimateReport(quantity="exact-rank", estimate=float(rank),
                                  target_epsilon=0.0,
                                  true_value=float(nm.operator_rank(doc["matrix_array"])),
                                  mode=config.mode)
    if q == "max-entropy":
        return est.estimate_max_entropy(oracle, args.delta, args.epsilon, config,
                                        kappa=args.kappa)
    raise ValidationError(f"unknown quantity {q!r}")


def cmd_estimate(args) -> int:
    report = _run_estimate(args)
    _dump({"format": REPORT_FORMAT, "tool_version": __version__,
           "generated_at": _timestamp(), "seed": args.seed,
           "report": report.as_dict()}, args.out)
    return EXIT_OK


def _verify_weyl(trials: int, rng: np.random.Generator) -> dict:
    worst, violations = 0.0, 0
    for _ in range(trials):
        dim = int(rng.choice([4, 8]))
        a = ginibre_state(dim, int(rng.integers(1, 5)), rng)
        b = ginibre_state(dim, int(rng.integers(1, 5)), rng)
        lhs, rhs = est.weyl_perturbation_bound(a, b, float(rng.uniform(0.05, 0.95)))
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        violations += ratio > 1.0
    return {"suite": "weyl", "trials": trials, "violations": violations,
            "worst_ratio": worst}


def _verify_truncation(trials: int, rng: np.random.Generator) -> dict:
    worst, violations = 0.0, 0
    for _ in range(trials):
        dim = int(rng.choice([4, 8]))
        r = int(rng.integers(1, 5))
        rho, sigma = shared_support_pair(dim, min(r, dim), rng, floor=0.02)
        nu = (rho - sigma) / 2.0
        mu = (rho + sigma) / 2.0
        alpha = float(rng.uniform(0.3, 2.5))
        delta = float(rng.uniform(0.005, 0.2))
        measured, bound = est.trace_distance_truncation_bound(nu, mu, alpha, delta)
        ratio = measured / bound if bound > 0 else 0.0
        worst = max(worst, ratio)
        violations += measured > bound + 1e-12
    return {"suite": "truncation", "trials": trials, "violations": violations,
            "worst_ratio": worst}


def _verify_holder(trials: int, rng: np.random.Generator) -> dict:
    worst, violations = 0.0, 0
    for _ in range(trials):
        dim = int(rng.choice([2, 4, 8]))
        a = ginibre_state(dim, int(rng.integers(1, dim + 1)), rng)
        psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        lhs, rhs = est.holder_power_norm_check(a, psi, float(rng.uniform(0.05, 0.95)))
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        violations += lhs > rhs + 1e-10
    return {"suite": "holder", "trials": trials, "violations": violations,
            "worst_ratio": worst}


def _verify_sandwich(trials: int, rng: np.random.Generator) -> dict:
    delta, eps = 0.05, 0.01
    lo, hi = tf.sandwich_coefficients(delta, eps)
    violations, worst = 0, 0.0
    for _ in range(trials):
        dim = int(rng.choice([4, 8]))
        rho = ginibre_state(dim, int(rng.integers(1, 5)), rng)
        out = tf.eigenvalue_threshold_projector(
            purification_of(rho, label="rho"), delta, eps)
        got = out.oracle.encoded.matrix
        w, v = np.linalg.eigh(rho)
        supp = v[:, w > 1e-10] @ v[:, w > 1e-10].conj().T
        supp2d = v[:, w > 2 * delta] @ v[:, w > 2 * delta].conj().T
        ok = (tf.psd_order_holds(lo * supp2d, got)
              and tf.psd_order_holds(got, hi * supp))
        violations += not ok
        gap = np.linalg.eigvalsh((got - lo * supp2d)).min()
        worst = max(worst, -float(gap))
    return {"suite": "sandwich", "trials": trials, "violations": violations,
            "worst_ratio": worst, "delta": delta, "epsilon": eps}


VERIFY_SUITES = {"weyl": _verify_weyl, "truncation": _verify_truncation,
                 "holder": _verify_holder, "sandwich": _verify_sandwich}


def cmd_verify(args) -> int:
    names = list(VERIFY_SUITES) if args.suite == "all" else [args.suite]
    if any(n not in VERIFY_SUITES for n in names):
        raise ValidationError(f"unknown suite {args.suite!r}")
    rng = np.random.default_rng(args.seed)
    results = [VERIFY_SUITES[n](args.trials, rng) for n in names]
    payload = {"format": "blockenc-verify-v1", "tool_version": __version__,
               "generated_at": _timestamp(), "seed": args.seed, "suites": results}
    _dump(payload, args.out)
    for res in results:
        status = "pass" if res["violations"] == 0 else "FAIL"
        print(f"{res['suite']}: {status} ({res['trials']} trials, "
              f"worst ratio {res['worst_ratio']:.4f})", file=sys.stderr)
    return EXIT_OK if all(r["violations"] == 0 for r in results) else EXIT_VERIFY


POLY_FAMILIES = ("pos-power", "neg-power", "threshold", "support-indicator",
                 "interior-indicator", "sqrt-neglog")


def cmd_approx_poly(args) -> int:
    fam = args.family
    if fam == "pos-power":
        poly = pa.approx_positive_power(args.c, args.delta, args.epsilon)
    elif fam == "neg-power":
        poly = pa.approx_negative_power(args.c, args.delta, args.epsilon)
    elif fam == "threshold":
        poly = pa.approx_threshold(args.t, args.delta, args.epsilon)
    elif fam == "support-indicator":
        poly = pa.approx_support_indicator(args.delta, args.epsilon)
    elif fam == "interior-indicator":
        poly = pa.approx_interior_indicator(args.delta, args.epsilon)
    elif fam == "sqrt-neglog":
        poly = pa.approx_sqrt_neglog(args.delta, args.epsilon)
    else:
        raise ValidationError(f"unknown family {fam!r}")
    _dump({"format": "blockenc-poly-v1", "tool_version": __version__,
           "family": poly.family, "params": poly.params,
           "degree": poly.degree, "parity": poly.parity,
           "certified_interval": list(poly.certified_interval),
           "certified_error": poly.certified_error,
           "global_bound": poly.global_bound,
           "chebyshev_coefficients": [float(c) for c in poly.coefficients]},
          args.out)
    return EXIT_OK


def _bench_fixture(quantity: str, r: int, rng: np.random.Generator):
    dim = max(4, 1 << (2 * r - 1).bit_length())
    dim = min(dim, 16)
    if quantity in ("trace-distance", "fidelity"):
        floor = min(0.2, 0.8 / r)
        a, b = shared_support_pair(dim, r, rng, floor=floor)
        return purification_of(a, label="rho"), purification_of(b, label="sigma")
    rho = floored_spectrum_state(dim, r, rng, floor=min(0.1, 0.8 / r))
    return (purification_of(rho, label="rho"),)


def _bench_run(quantity: str, alpha, oracles, r: int, eps: float, config):
    if quantity == "von-neumann":
        return est.estimate_von_neumann(oracles[0], r, eps, config)
    if quantity == "renyi":
        return est.estimate_renyi(oracles[0], alpha, r, eps, config)
    if quantity == "tsallis":
        return est.estimate_tsallis(oracles[0], alpha, r, eps, config)
    if quantity == "trace-power":
        return est.estimate_trace_power(oracles[0], alpha, r, eps, config)
    if quantity == "trace-distance":
        return est.estimate_trace_distance(oracles[0], oracles[1],
                                           alpha if alpha else 1.0, r, eps, config)
    if quantity == "fidelity":
        return est.estimate_fidelity(oracles[0], oracles[1],
                                     alpha if alpha else 0.5, r, eps, config)
    raise ValidationError(f"benchmark does not support quantity {quantity!r}")


def _slope(xs, qs) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, dtype=float)),
                            np.log(np.asarray(qs, dtype=float)), 1)[0])


def cmd_bench_scaling(args) -> int:
    sweep_r = [int(x) for x in args.sweep_r.split(",")] if args.sweep_r else []
    sweep_eps = [float(x) for x in args.sweep_eps.split(",")] if args.sweep_eps else []
    config = est.AmplitudeEstimatorConfig(mode="analytic", seed=args.seed)
    points, r_qs, e_qs = [], [], []
    for r in sweep_r:
        rng = np.random.default_rng((args.seed, r))
        rep = _bench_run(args.quantity, args.alpha,
                         _bench_fixture(args.quantity, r, rng), r, args.epsilon,
                         config)
        total = rep.ledger.query_count()
        r_qs.append(total)
        points.append({"r": r, "eps": args.epsilon, "queries": dict(rep.ledger.queries),
                       "total": total})
    for eps in sweep_eps:
        rng = np.random.default_rng((args.seed, 1000))
        rep = _bench_run(args.quantity, args.alpha,
                         _bench_fixture(args.quantity, args.r, rng), args.r, eps,
                         config)
        total = rep.ledger.query_count()
        e_qs.append(total)
        points.append({"r": args.r, "eps": eps, "queries": dict(rep.ledger.queries),
                       "total": total})
    payload = {"format": "blockenc-bench-v1", "tool_version": __version__,
               "generated_at": _timestamp(), "quantity": args.quantity,
               "alpha": args.alpha, "seed": args.seed, "points": points,
               "slope_tolerance_note": "fits absorb polylog factors; defaults "
                                       "+-0.5 in r and +-0.7 in 1/eps"}
    if len(r_qs) >= 2:
        payload["slope_r"] = _slope(sweep_r, r_qs)
    if len(e_qs) >= 2:
        payload["slope_eps"] = _slope([1.0 / e for e in sweep_eps], e_qs)
    _dump(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockenc",
        description="Desk-scale simulator for block-encoded density operators")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-state", help="write a random low-rank density operator")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--rank", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gen_state)

    e = sub.add_parser("estimate", help="run an estimator and write its report")
    e.add_argument("--quantity", choices=QUANTITIES, required=True)
    e.add_argument("--alpha", type=float, default=None)
    e.add_argument("--epsilon", type=float, default=0.1)
    e.add_argument("--state", required=True)
    e.add_argument("--state2", default=None)
    e.add_argument("--rank-bound", type=int, default=None)
    e.add_argument("--ae-mode", choices=est.MODES, default="analytic")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--kappa", type=float, default=None)
    e.add_argument("--delta", type=float, default=0.05)
    e.add_argument("--epsilon-prime", type=float, default=0.1)
    e.add_argument("--out", default=None)
    e.set_defaults(fn=cmd_estimate)

    v = sub.add_parser("verify", help="run the inequality verification sweeps")
    v.add_argument("--suite", default="all",
                   choices=tuple(VERIFY_SUITES) + ("all",))
    v.add_argument("--trials", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.set_defaults(fn=cmd_verify)

    p = sub.add_parser("approx-poly", help="construct and dump a certified polynomial")
    p.add_argument("--family", choices=POLY_FAMILIES, required=True)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_approx_poly)

    b = sub.add_parser("bench-scaling", help="ledger query counts across sweeps")
    b.add_argument("--quantity", required=True)
    b.add_argument("--alpha", type=float, default=None)
    b.add_argument("--sweep-r", default=None)
    b.add_argument("--sweep-eps", default=None)
    b.add_argument("--epsilon", type=float, default=0.1)
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default=None)
    b.set_defaults(fn=cmd_bench_scaling)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (est.ScheduleBudgetError, pa.CertificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
