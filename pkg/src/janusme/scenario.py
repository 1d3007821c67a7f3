"""Scenario files: TOML documents describing one simulation run.

Example::

    kind = "pair_ab"
    g = 0.5
    kappa = 1.0
    cutoffs = [24, 24]
    sector = 0
    t_max = 2.0
    n_samples = 5

    [reference]
    type = "pair_coherent"
    zeta = [0.0, -1.0]
    q = 0

Complex numbers are written as ``[re, im]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .janus import KINDS, PAIR_KINDS

BETA_LIMIT = 0.5
REFERENCE_TYPES = ("pair_coherent", "tmss", "cat", "squeezed_vac")
_KNOWN_KEYS = {
    "kind", "beta", "g", "kappa", "cutoffs", "sector", "t_max", "n_samples", "tol",
    "initial", "reference", "solver",
}


class ScenarioError(ValueError):
    """Validation failure carrying a machine-readable ``code`` such as ``validation.kappa``."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def as_dict(self) -> dict:
        return {"error": {"code": self.code, "message": str(self)}}


@dataclass(frozen=True)
class Scenario:
    kind: str
    g: float
    kappa: float
    cutoffs: tuple[int, ...]
    beta: complex = 0.0
    sector: Optional[object] = None
    t_max: float = 1.0
    n_samples: int = 11
    tol: float = 1e-10
    initial: Optional[tuple[int, ...]] = None
    reference: Optional[dict] = None
    method: str = "auto"
    max_step: float = math.inf
    name: str = "scenario"

    @property
    def initial_occupations(self) -> tuple[int, ...]:
        return self.initial if self.initial is not None else (0,) * len(self.cutoffs)

    def times(self) -> list[float]:
        step = self.t_max / (self.n_samples - 1)
        return [k * step for k in range(self.n_samples)]


def _complex(value, code: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError(code, f"expected a number or [re, im], got {value!r}")


def _real(doc: dict, key: str, default=None) -> float:
    value = doc.get(key, default)
    if value is None:
        raise ScenarioError(f"validation.{key}", f"missing required field {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"validation.{key}", f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(f"validation.{key}", f"{key} must be finite")
    return value


def _int_list(value, code: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ScenarioError(code, f"expected a non-empty list of integers, got {value!r}")
    return tuple(value)


def _reference(doc) -> Optional[dict]:
    if doc is None:
        return None
    if not isinstance(doc, dict) or doc.get("type") not in REFERENCE_TYPES:
        raise ScenarioError("validation.reference", f"reference.type must be one of {REFERENCE_TYPES}")
    ref = {"type": doc["type"]}
    for key, value in doc.items():
        if key == "type":
            continue
        if key in ("zeta", "alpha"):
            ref[key] = _complex(value, "validation.reference")
        elif key in ("r", "phase"):
            ref[key] = _real(doc, key)
        elif key in ("q",) and isinstance(value, int):
            ref[key] = value
        elif key == "parity" and value in ("even", "odd"):
            ref[key] = value
        else:
            raise ScenarioError("validation.reference", f"bad reference field {key}={value!r}")
    return ref


def parse_scenario(doc: dict, name: str = "scenario", allow_large_beta: bool = False) -> Scenario:
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ScenarioError("validation.config", f"unknown fields {sorted(unknown)}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioError("validation.kind", f"kind must be one of {KINDS}, got {kind!r}")
    g = _real(doc, "g")
    kappa = _real(doc, "kappa")
    if kappa < 0:
        raise ScenarioError("validation.kappa", f"kappa must be >= 0, got {kappa}")
    cutoffs = _int_list(doc.get("cutoffs"), "validation.cutoffs")
    if any(c < 2 for c in cutoffs):
        raise ScenarioError("validation.cutoffs", "every cutoff must be >= 2")
    need = 2 if kind in PAIR_KINDS else 1
    if len(cutoffs) != need:
        raise ScenarioError("validation.cutoffs", f"{kind} needs exactly {need} cutoffs")
    beta = _complex(doc.get("beta", 0.0), "validation.beta")
    if kind in ("pair_ab", "square_a2") and beta != 0:
        raise ScenarioError("validation.beta", f"{kind} takes no beta")
    if abs(beta) > BETA_LIMIT and not allow_large_beta:
        raise ScenarioError("validation.beta", f"|beta| = {abs(beta):.3g} exceeds {BETA_LIMIT}; pass --allow-large-beta")
    sector = doc.get("sector")
    if sector is not None:
        if kind in ("pair_ab", "pair_beta"):
            ok = isinstance(sector, int) and not isinstance(sector, bool)
        elif kind == "square_a2":
            ok = sector in ("even", "odd", 0, 1)
        else:
            ok = False
        if not ok:
            raise ScenarioError("validation.sector", f"sector {sector!r} is not valid for {kind}")
    t_max = _real(doc, "t_max", 1.0)
    if t_max <= 0:
        raise ScenarioError("validation.t_max", "t_max must be positive")
    n_samples = doc.get("n_samples", 11)
    if not isinstance(n_samples, int) or isinstance(n_samples, bool) or n_samples < 2:
        raise ScenarioError("validation.n_samples", "n_samples must be an integer >= 2")
    tol = _real(doc, "tol", 1e-10)
    if not 0 < tol < 1:
        raise ScenarioError("validation.tol", "tol must lie in (0, 1)")
    initial = doc.get("initial")
    if initial is not None:
        initial = _int_list(initial, "validation.initial")
        if len(initial) != len(cutoffs) or any(not 0 <= n < c for n, c in zip(initial, cutoffs)):
            raise ScenarioError("validation.initial", f"initial occupations {initial} do not fit cutoffs {cutoffs}")
    solver = doc.get("solver", {})
    if not isinstance(solver, dict) or set(solver) - {"method", "max_step"}:
        raise ScenarioError("validation.solver", "solver accepts only method and max_step")
    method = solver.get("method", "auto")
    if method not in ("auto", "dense_null", "shift_invert"):
        raise ScenarioError("validation.solver", f"unknown steady-state method {method!r}")
    max_step = _real(solver, "max_step", math.inf) if "max_step" in solver else math.inf
    if max_step <= 0:
        raise ScenarioError("validation.solver", "max_step must be positive")
    return Scenario(
        kind=kind, g=g, kappa=kappa, cutoffs=cutoffs, beta=beta, sector=sector, t_max=t_max,
        n_samples=n_samples, tol=tol, initial=initial, reference=_reference(doc.get("reference")),
        method=method, max_step=max_step, name=name,
    )


def load_scenario(path, allow_large_beta: bool = False, tol: Optional[float] = None) -> Scenario:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ScenarioError("validation.config", f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("validation.config", f"{path}: {exc}") from None
    if tol is not None:
        doc["tol"] = tol
    return parse_scenario(doc, name=path.stem, allow_large_beta=allow_large_beta)

