"""
Machine-readable artifacts: JSON documents and CSV tables, both carrying
the echo of the run configuration.
"""
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import mpmath

from permclt.asymptotics import ConvergenceRow, CovMatrix2
from permclt.exactpoly import QPoly, TQPoly
from permclt.montecarlo import NormalizedMoments, SampleStats
from permclt.oracle import JointDistribution
from permclt.utils import REPORTED_DIGITS


def real(x: Any) -> float:
    """ A real number as it appears in JSON: the nearest double """
    return float(x)


def real_text(x: Any) -> str:
    """ A real number as it appears in CSV """
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, REPORTED_DIGITS)
    return f"{float(x):.{REPORTED_DIGITS}g}"


def optional_real(x: Any) -> Optional[float]:
    return None if x is None else real(x)


def optional_text(x: Any) -> str:
    return "" if x is None else real_text(x)


def exact(x: Any) -> Any:
    """ Integers stay integers, other rationals become "p/q" strings """
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def render_json(echo: Mapping[str, Any], payload: Mapping[str, Any]) -> str:
    document = dict(payload)
    document["config"] = dict(echo)
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def render_csv(echo: Mapping[str, Any], header: Sequence[str],
               rows: Iterable[Sequence[Any]]) -> str:
    """
    Leading "# key=value" lines with the configuration echo, then the
    header and the rows
    """
    buffer = io.StringIO()
    for key in sorted(echo):
        value = echo[key]
        buffer.write(f"# {key}={json.dumps(value) if isinstance(value, (list, dict)) else value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def emit(text: str, output: Optional[str] = None) -> None:
    """
    Write an artifact to <output>, or to stdout when no path is given
    """
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(output, "w", newline="") as fd:
            fd.write(text)
    except OSError as e:
        logging.critical("Cannot write %s: %s", output, e)
        raise
    logging.info("Wrote %s", output)


def tqpoly_payload(gf: TQPoly) -> Dict[str, Any]:
    payload: Dict[str, Any] = gf.to_dict()
    payload["text"] = gf.format()
    return payload


def t_polynomial_payload(poly: QPoly) -> Dict[str, Any]:
    """ A polynomial in t, e.g. the q = 1 specialization """
    return {"coefficients": [exact(c) for c in poly.coeffs], "text": poly.format('t')}


def t_polynomial_rows(poly: QPoly) -> List[List[Any]]:
    return [[d, exact(c)] for d, c in enumerate(poly.coeffs) if c]


def distribution_rows(gf: TQPoly) -> List[List[Any]]:
    return [[d, maj, exact(c)] for d, maj, c in gf.items()]


def distribution_payload(dist: JointDistribution) -> Dict[str, Any]:
    return {"lambda": dist.lam.to_text(), "n": dist.lam.n, "total": dist.total(),
            "rows": [list(row) for row in dist.rows()]}


def cov_payload(m: CovMatrix2) -> Dict[str, Any]:
    s11, s12, s22 = m.as_tuple()
    if isinstance(s11, Fraction):
        return {"s11": str(s11), "s12": str(s12), "s22": str(s22), "det": str(m.det)}
    return {"s11": real(s11), "s12": real(s12), "s22": real(s22), "det": real(m.det)}


def sample_payload(stats: SampleStats, moments: NormalizedMoments) -> Dict[str, Any]:
    w11, w12, w22 = moments.cov_W
    mgf = []
    if stats.grid:
        for (s, r), mean, stderr in zip(stats.grid, stats.mgf_means(), stats.mgf_stderrs()):
            mgf.append({"s": s, "r": r, "mgf": real(mean), "stderr": real(stderr)})
    return {"lambda": stats.lam.to_text(), "n": stats.lam.n, "alpha1": str(stats.lam.alpha1),
            "count": stats.count,
            "mean_W": [real(moments.mean_W[0]), real(moments.mean_W[1])],
            "cov_W": {"w11": real(w11), "w12": real(w12), "w22": real(w22)},
            "correlation": real(moments.correlation),
            "mgf": mgf}


def sample_rows(stats: SampleStats) -> List[List[Any]]:
    if not stats.grid:
        return []
    return [[real_text(s), real_text(r), real_text(mean), real_text(stderr)]
            for (s, r), mean, stderr in zip(stats.grid, stats.mgf_means(), stats.mgf_stderrs())]


CONVERGENCE_HEADER = ("n", "alpha1", "source", "mgf", "target", "abs_err", "err_times_n16",
                      "mgf_large_a", "small_a_bound")


def convergence_rows(rows: Sequence[ConvergenceRow]) -> List[List[Any]]:
    return [[row.n, str(row.alpha1), row.source, real_text(row.mgf), real_text(row.target),
             real_text(row.abs_err), real_text(row.err_times_n16),
             optional_text(row.mgf_large_a), optional_text(row.small_a_bound)] for row in rows]


def convergence_payload(rows: Sequence[ConvergenceRow]) -> Dict[str, Any]:
    return {"rows": [{"lambda": row.lam.to_text(), "n": row.n, "alpha1": str(row.alpha1),
                      "source": row.source, "mgf": real(row.mgf), "target": real(row.target),
                      "abs_err": real(row.abs_err), "err_times_n16": real(row.err_times_n16),
                      "stderr": real(row.stderr), "growth_flag": row.growth_flag,
                      "mgf_large_a": optional_real(row.mgf_large_a),
                      "small_a_bound": optional_real(row.small_a_bound)}
                     for row in rows]}
