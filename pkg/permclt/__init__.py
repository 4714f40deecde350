import logging
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

from permclt.asymptotics import (ConvergenceBudgets, QuadratureSettings, convergence_report,
                                 parse_family, quadform, sigma, target_mgf)
from permclt.combinatorics import CycleType, class_size
from permclt.config import RunConfig
from permclt.errors import ValidationError
from permclt.genfun import eulerian_specialization, joint_gf, mgf_exact
from permclt.montecarlo import normalized_moments, run_sampling
from permclt.oracle import joint_distribution_bruteforce
from permclt.output import (CONVERGENCE_HEADER, convergence_payload, convergence_rows, cov_payload,
                            distribution_payload, distribution_rows, emit, exact, real, real_text,
                            render_csv, render_json, sample_payload, sample_rows,
                            t_polynomial_payload, t_polynomial_rows, tqpoly_payload)
from permclt.utils import resolve_precision
from permclt.verify import VerifySettings, format_table, run_suite

Rows = List[List[Any]]


def run(config: RunConfig) -> int:
    """
    Execute one subcommand and write its artifact.

    :return: the process exit code
    """
    resolve_precision(config.precision, config.max_precision)
    if config.subcommand == "verify":
        return run_verify(config)
    handlers = {
        "exact": run_exact,
        "oracle": run_oracle,
        "sample": run_sample,
        "mgf": run_mgf,
        "sigma": run_sigma,
        "converge": run_converge,
    }
    if config.subcommand not in handlers:
        raise ValidationError(f"Unknown subcommand {config.subcommand!r}")
    payload, header, rows = handlers[config.subcommand](config)
    write(config, payload, header, rows)
    return 0


def write(config: RunConfig, payload: Dict[str, Any], header: Sequence[str], rows: Rows) -> None:
    if config.output_format == "csv":
        emit(render_csv(config.echo(), header, rows), config.output)
    else:
        emit(render_json(config.echo(), payload), config.output)


def require_lambda(config: RunConfig) -> CycleType:
    if config.lam is None:
        raise ValidationError(f"{config.subcommand} needs --lambda")
    return CycleType.parse(config.lam)


def require_point(config: RunConfig) -> Tuple[float, float]:
    if config.s is None or config.r is None:
        raise ValidationError(f"{config.subcommand} needs both --s and --r")
    if config.s <= 0 or config.r <= 0:
        raise ValidationError(f"--s and --r must be positive, got s={config.s}, r={config.r}")
    return config.s, config.r


def run_exact(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    lam = require_lambda(config)
    payload: Dict[str, Any] = {"lambda": lam.to_text(), "n": lam.n, "class_size": class_size(lam)}
    if config.q1:
        poly = eulerian_specialization(lam)
        payload["q1"] = t_polynomial_payload(poly)
        return payload, ("d", "count"), t_polynomial_rows(poly)
    gf = joint_gf(lam).gf
    payload["gf"] = tqpoly_payload(gf)
    return payload, ("d", "maj", "count"), distribution_rows(gf)


def run_oracle(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    dist = joint_distribution_bruteforce(require_lambda(config), config.oracle_cap)
    return distribution_payload(dist), ("d", "maj", "count"), [list(row) for row in dist.rows()]


def run_sample(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    lam = require_lambda(config)
    stats = run_sampling(lam, config.samples, config.grid, config.seed, config.workers,
                         config.streams, config.rng, config.batch_elements)
    return (sample_payload(stats, normalized_moments(stats)), ("s", "r", "mgf", "stderr"),
            sample_rows(stats))


def run_mgf(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    lam = require_lambda(config)
    s, r = require_point(config)
    value = mgf_exact(lam, s, r, config.precision, config.max_precision)
    target = target_mgf(lam.alpha1, Fraction(s), Fraction(r), config.precision)
    error = abs(value - target)
    logging.info("M(-%g, -%g) of %s = %s, target %s", s, r, lam, value, target)
    payload = {"lambda": lam.to_text(), "n": lam.n, "alpha1": str(lam.alpha1), "s": s, "r": r,
               "mgf": real(value), "target": real(target), "abs_err": real(error)}
    row = [lam.n, str(lam.alpha1), real_text(s), real_text(r), real_text(value),
           real_text(target), real_text(error)]
    return payload, ("n", "alpha1", "s", "r", "mgf", "target", "abs_err"), [row]


def run_sigma(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    if config.alpha is None:
        raise ValidationError("sigma needs --alpha")
    try:
        alpha = Fraction(config.alpha)
    except ValueError:
        raise ValidationError(f"Malformed --alpha {config.alpha!r}, expected a rational like 1/2 or 0.25")
    m = sigma(alpha)
    payload: Dict[str, Any] = {"alpha": str(alpha), "sigma": cov_payload(m)}
    header: List[str] = ["alpha", "s11", "s12", "s22"]
    row: List[Any] = [str(alpha)] + [str(x) for x in m.as_tuple()]
    if config.s is not None or config.r is not None:
        s, r = require_point(config)
        form = quadform(m, Fraction(s), Fraction(r))
        target = target_mgf(alpha, Fraction(s), Fraction(r), config.precision)
        payload.update({"quadform": exact(form), "target": real(target)})
        header += ["quadform", "target"]
        row += [str(form), real_text(target)]
    return payload, header, [row]


def run_converge(config: RunConfig) -> Tuple[Dict[str, Any], Sequence[str], Rows]:
    if config.family is None:
        raise ValidationError("converge needs --family")
    s, r = require_point(config)
    budgets = ConvergenceBudgets(exact_max_n=config.exact_max_n, samples=config.samples,
                                 seed=config.seed, workers=config.workers,
                                 streams=config.streams, rng_name=config.rng,
                                 batch_elements=config.batch_elements,
                                 precision=config.precision, epsilon=config.epsilon,
                                 quadrature=QuadratureSettings(config.quad_epsabs, config.quad_epsrel,
                                                               config.quad_limit),
                                 partition_cap=config.partition_cap)
    rows = convergence_report(parse_family(config.family), s, r, budgets)
    return convergence_payload(rows), CONVERGENCE_HEADER, convergence_rows(rows)


def run_verify(config: RunConfig) -> int:
    settings = VerifySettings(
            max_n=config.max_n, oracle_cap=config.oracle_cap, samples=config.samples,
            seed=config.seed, workers=config.workers, streams=config.streams,
            rng_name=config.rng, batch_elements=config.batch_elements,
            precision=config.precision,
            quadrature=QuadratureSettings(config.quad_epsabs, config.quad_epsrel, config.quad_limit),
            partition_cap=config.partition_cap, epsilon=config.epsilon)
    results = run_suite(config.suite, settings)
    if config.output_format == "csv":
        text = render_csv(config.echo(), ("suite", "check", "status", "detail"),
                          [[r.suite, r.name, r.status, r.detail] for r in results])
    elif config.output_format == "json":
        text = render_json(config.echo(), {"checks": [
                {"suite": r.suite, "check": r.name, "status": r.status, "detail": r.detail}
                for r in results]})
    else:
        text = format_table(results)
    emit(text, config.output)
    if any(r.fatal for r in results):
        return 3
    if not all(r.passed for r in results):
        return 2
    return 0
