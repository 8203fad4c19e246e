"""JSON encodings for matrices, measures, generators, ensembles, channels.

Matrix encoding: {"dim": d, "re": [[...]], "im": [[...]]} with row-major real
and imaginary parts; an omitted "im" means an all-zero imaginary part.
"""

from __future__ import annotations

import numpy as np

from .barycenter import SolverReport, WeightedEnsemble
from .channels import QuantumChannel
from .errors import DomainError
from .generators import (
    ArithmeticGenerator,
    Generator,
    GeometricGenerator,
    HarmonicGenerator,
    LogGenerator,
    MeasureGenerator,
    PowerGenerator,
)
from .hermitian import MatrixLike, _mat
from .measures import (
    ArcsineMeasure,
    BetaTypeMeasure,
    DiscreteMeasure,
    Measure,
    TabulatedMeasure,
)


def matrix_to_json(M: MatrixLike) -> dict:
    mat = _mat(M)
    obj = {"dim": mat.shape[0], "re": mat.real.tolist()}
    if np.any(mat.imag != 0.0):
        obj["im"] = mat.imag.tolist()
    return obj


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix object: {exc}") from exc
    im = np.asarray(obj.get("im", np.zeros((dim, dim))), dtype=np.float64)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DomainError(
            f"matrix parts must be {dim}x{dim}, got re{re.shape} im{im.shape}"
        )
    return re + 1j * im


def measure_to_json(mu: Measure) -> dict:
    if isinstance(mu, ArcsineMeasure):
        return {"kind": "arcsine"}
    if isinstance(mu, BetaTypeMeasure):
        return {"kind": "beta", "t": mu.t}
    if isinstance(mu, DiscreteMeasure):
        return {"kind": "discrete", "atoms": [[l, m] for l, m in mu.atoms]}
    if isinstance(mu, TabulatedMeasure):
        return {"kind": "tabulated", "nodes": list(mu.nodes), "weights": list(mu.weights)}
    raise DomainError(f"unknown measure variant {type(mu).__name__}")


def measure_from_json(obj: dict) -> Measure:
    kind = obj.get("kind")
    if kind == "arcsine":
        return ArcsineMeasure()
    if kind == "beta":
        return BetaTypeMeasure(float(obj["t"]))
    if kind == "discrete":
        return DiscreteMeasure(tuple((float(l), float(m)) for l, m in obj["atoms"]))
    if kind == "tabulated":
        return TabulatedMeasure(tuple(obj["nodes"]), tuple(obj["weights"]))
    raise DomainError(f"unknown measure kind {kind!r}")


def generator_to_json(gen: Generator) -> dict:
    if isinstance(gen, ArithmeticGenerator):
        return {"kind": "arithmetic", "lambda": gen.lam}
    if isinstance(gen, GeometricGenerator):
        return {"kind": "geometric", "lambda": gen.lam}
    if isinstance(gen, HarmonicGenerator):
        return {"kind": "harmonic", "lambda": gen.lam}
    if isinstance(gen, MeasureGenerator):
        return {"kind": "measure", "mu": measure_to_json(gen.mu)}
    if isinstance(gen, LogGenerator):
        return {"kind": "log"}
    if isinstance(gen, PowerGenerator):
        return {"kind": "power", "t": gen.t}
    raise DomainError(f"unknown generator variant {type(gen).__name__}")


def generator_from_json(obj: dict) -> Generator:
    kind = obj.get("kind")
    if kind == "arithmetic":
        return ArithmeticGenerator(float(obj["lambda"]))
    if kind == "geometric":
        return GeometricGenerator(float(obj["lambda"]))
    if kind == "harmonic":
        return HarmonicGenerator(float(obj["lambda"]))
    if kind == "measure":
        return MeasureGenerator(measure_from_json(obj["mu"]))
    if kind == "log":
        return LogGenerator()
    if kind == "power":
        return PowerGenerator(float(obj["t"]))
    raise DomainError(f"unknown generator kind {kind!r}")


def ensemble_to_json(ens: WeightedEnsemble) -> dict:
    return {
        "matrices": [matrix_to_json(A) for A in ens.matrices],
        "weights": ens.weights.tolist(),
    }


def ensemble_from_json(obj: dict) -> WeightedEnsemble:
    try:
        mats = [matrix_from_json(m) for m in obj["matrices"]]
        weights = np.asarray(obj["weights"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed ensemble object: {exc}") from exc
    return WeightedEnsemble(tuple(mats), weights)


def channel_to_json(T: QuantumChannel) -> dict:
    return {"kraus": [matrix_to_json(K) for K in T.kraus]}


def channel_from_json(obj: dict) -> QuantumChannel:
    try:
        kraus = tuple(matrix_from_json(K) for K in obj["kraus"])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed channel object: {exc}") from exc
    return QuantumChannel(kraus)


def report_to_json(report: SolverReport) -> dict:
    return {
        "solution": matrix_to_json(report.solution),
        "iterations": report.iterations,
        "final_residual": report.final_residual,
        "objective_trace": list(report.objective_trace),
        "converged": report.converged,
    }
