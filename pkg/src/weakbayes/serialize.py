"""Problem files, report JSON and sweep CSV.

Wire conventions: a complex scalar is a two-element array [re, im]; a
vector is an array of such pairs; a matrix is a row-major array of rows.
A problem object carries exactly one of "psi"/"rho", plus "observable",
an optional "basis" (list of basis vectors; defaults to the standard
basis) and optional "tolerances" overrides.

All emitters sort JSON keys and format floats with their shortest
round-trip representation, so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import linalg, states
from .estimation import TOL_ID, LossReport
from .exceptions import ProblemFormatError, WeakBayesError
from .states import DensityMatrix, Observable, PostselectionBasis, PureState
from .weak_values import EPS_PS, Estimator, WeakValueProfile

PROBLEM_VERSION = 1

DEFAULT_TOLERANCES = {
    "herm": linalg.TOL_HERM,
    "psd": linalg.TOL_PSD,
    "norm": states.TOL_NORM,
    "postselect_cutoff": EPS_PS,
    "identity": TOL_ID,
}


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


def _decode_complex(node: Any, where: str) -> complex:
    if (
        not isinstance(node, (list, tuple))
        or len(node) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in node)
    ):
        raise ProblemFormatError(f"{where}: expected a [re, im] pair", field=where)
    return complex(node[0], node[1])


def decode_vector(node: Any, where: str) -> np.ndarray:
    if not isinstance(node, list) or not node:
        raise ProblemFormatError(f"{where}: expected a nonempty array", field=where)
    return np.array(
        [_decode_complex(entry, f"{where}[{i}]") for i, entry in enumerate(node)],
        dtype=np.complex128,
    )


def decode_matrix(node: Any, where: str) -> np.ndarray:
    if not isinstance(node, list) or not node:
        raise ProblemFormatError(f"{where}: expected a nonempty array of rows", field=where)
    rows = [decode_vector(row, f"{where}[{i}]") for i, row in enumerate(node)]
    width = rows[0].shape[0]
    if any(r.shape[0] != width for r in rows):
        raise ProblemFormatError(f"{where}: ragged rows", field=where)
    return np.array(rows, dtype=np.complex128)


@dataclass(frozen=True)
class Problem:
    """Decoded problem file: prior, observable, basis and tolerances."""

    rho: DensityMatrix
    observable: Observable
    basis: PostselectionBasis
    psi: PureState | None = None
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))


def problem_from_dict(data: Any) -> Problem:
    """Build and cross-validate a problem; raises ProblemFormatError."""
    if not isinstance(data, dict):
        raise ProblemFormatError("problem root must be an object")
    version = data.get("version", PROBLEM_VERSION)
    if version != PROBLEM_VERSION:
        raise ProblemFormatError(f"unsupported version {version!r}", field="version")
    unknown = set(data) - {"version", "psi", "rho", "observable", "basis", "tolerances"}
    if unknown:
        raise ProblemFormatError(f"unknown fields {sorted(unknown)}", field=sorted(unknown)[0])

    has_psi = "psi" in data
    has_rho = "rho" in data
    if has_psi == has_rho:
        raise ProblemFormatError("exactly one of 'psi' or 'rho' is required", field="psi")

    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ProblemFormatError("tolerances must be an object", field="tolerances")
    bad = set(tolerances) - set(DEFAULT_TOLERANCES)
    if bad:
        raise ProblemFormatError(
            f"unknown tolerance keys {sorted(bad)}", field="tolerances"
        )

    try:
        psi = None
        if has_psi:
            psi = PureState(decode_vector(data["psi"], "psi"))
            rho = states.density_from_pure(psi)
        else:
            rho = DensityMatrix(decode_matrix(data["rho"], "rho"))
        if "observable" not in data:
            raise ProblemFormatError("missing 'observable'", field="observable")
        observable = Observable(decode_matrix(data["observable"], "observable"))
        if "basis" in data:
            vectors = decode_matrix(data["basis"], "basis")
            basis = PostselectionBasis.from_vectors(vectors)
        else:
            basis = PostselectionBasis.standard(rho.dim)
    except ProblemFormatError:
        raise
    except (WeakBayesError, ValueError) as exc:
        raise ProblemFormatError(str(exc)) from exc

    dims = {rho.dim, observable.dim, basis.dim}
    if len(dims) != 1:
        raise ProblemFormatError(
            f"dimension mismatch: rho {rho.dim}, observable {observable.dim}, "
            f"basis {basis.dim}",
            field="observable",
        )
    return Problem(rho=rho, observable=observable, basis=basis, psi=psi, tolerances=dict(tolerances))


def load_problem(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(data)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


def complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v: np.ndarray) -> list:
    return [complex_pair(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m: np.ndarray) -> list:
    return [encode_vector(row) for row in np.asarray(m)]


def profile_to_obj(prof: WeakValueProfile) -> list[dict]:
    out = []
    for e in prof:
        out.append(
            {
                "label": e.label,
                "prob": e.prob,
                "alpha": None if e.excluded else complex_pair(e.alpha),
                "mu": None if e.excluded else e.mu,
                "sigma": None if e.excluded else e.sigma,
                "excluded": e.excluded,
            }
        )
    return out


def estimator_to_obj(est: Estimator) -> dict:
    return {
        "labels": list(est.basis.labels),
        "values": [float(v) for v in est.values],
        "zeroed": list(est.zeroed),
    }


def report_to_obj(report: LossReport) -> dict:
    return {
        "loss": report.loss,
        "a2": report.a2,
        "theta2": report.theta2,
        "gap": report.gap,
        "sigma2": report.sigma2,
        "mu2": report.mu2,
        "schwarz_slack": report.schwarz_slack,
        "decomposition_ok": report.decomposition_ok,
        "schwarz_ok": report.schwarz_ok,
        "loss_bound_ok": report.loss_bound_ok,
        "sigma_bound_ok": report.sigma_bound_ok,
        "pure_saturation_ok": report.pure_saturation_ok,
    }


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def format_cell(value: Any) -> str:
    """Stable CSV cell: shortest round-trip floats, '.' decimal."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
