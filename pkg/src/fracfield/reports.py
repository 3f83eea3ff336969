"""Report records shared by the verification suites and the solver.

Two small dataclasses and their (de)serialization:

* :class:`VerificationReport` -- the outcome of one identity / inequality /
  convergence suite: residual norms, inequality margins, a refinement table,
  and a pass flag that is a pure function of the recorded numbers.
* :class:`SolveReport` -- the outcome of one linear solve: iteration count,
  residual history, the final weak residual, and energy diagnostics.

Serialization notes
-------------------
``to_json`` output is deterministic: keys are sorted, floats go through
``repr`` (shortest round-trip form), and ``wall_time`` is deliberately **not**
serialized -- rerunning a suite with the same seed and flags must produce a
byte-identical report, and elapsed time is the one field that cannot satisfy
that.  The field is still populated on the in-memory object for callers that
want it (the command line prints it to stderr).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

__all__ = (
    "VerificationReport",
    "SolveReport",
    "report_from_dict",
)

_SCALE_FLOOR = 1e-300


def relative(abs_residual: float, scale: float) -> float:
    """Relative residual with a hard floor against zero scales."""
    return abs_residual / max(scale, _SCALE_FLOOR)


def _jsonable(value: Any) -> Any:
    """Round-trip-safe plain-python conversion (numpy scalars -> float/int)."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    if hasattr(value, "item"):  # numpy scalar
        return _jsonable(value.item())
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


@dataclass
class VerificationReport:
    """Outcome of a single verification suite.

    Attributes
    ----------
    suite:
        Suite name (``"leibniz"``, ``"duality"``, ...).
    alpha:
        The order the suite ran at (0.0 when not applicable).
    grid:
        Grid metadata: ``{"dim": n, "N": N, "lo": [...], "hi": [...]}``.
    residuals:
        ``{"l1": ..., "l2": ..., "linf": ..., "rel_l1": ..., "rel_l2": ...,
        "rel_linf": ..., "scale": ...}``.  Relative values are absolute /
        max(scale, floor); the scale is the suite's declared operand-norm
        product and is recorded so the normalization is auditable.
    margins:
        For inequality suites: the worst (most negative) slack of each bound,
        keyed by bound name.  Empty for identity suites.
    refinement:
        ``[[N, residual], ...]`` across grid sizes, coarse to fine; empty for
        single-grid suites.
    passed:
        Pure function of the numbers above against the suite's stated
        tolerance (recomputable by the reader).
    exponents:
        Any exponent bookkeeping the suite wants to record (p, q, ...).
    details:
        Free-form extras (per-case residuals, corpus notes).  Everything in
        here must be JSON-serializable numbers/strings.
    wall_time:
        Elapsed seconds.  Kept on the object, excluded from ``to_json``.
    """

    suite: str
    alpha: float
    grid: dict[str, Any]
    residuals: dict[str, float]
    passed: bool
    margins: dict[str, float] = field(default_factory=dict)
    refinement: list[list[float]] = field(default_factory=list)
    exponents: dict[str, float] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        """Serializable payload; ``pass`` mirrors ``passed`` for readers."""
        return {
            "suite": self.suite,
            "alpha": _jsonable(self.alpha),
            "grid": _jsonable(self.grid),
            "residuals": _jsonable(self.residuals),
            "margins": _jsonable(self.margins),
            "refinement": _jsonable(self.refinement),
            "exponents": _jsonable(self.exponents),
            "details": _jsonable(self.details),
            "pass": bool(self.passed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "VerificationReport":
        return cls(
            suite=str(payload["suite"]),
            alpha=float(payload["alpha"]),
            grid=dict(payload["grid"]),
            residuals={k: float(v) for k, v in payload["residuals"].items()},
            passed=bool(payload["pass"]),
            margins={k: float(v) for k, v in payload.get("margins", {}).items()},
            refinement=[[float(a), float(b)] for a, b in payload.get("refinement", [])],
            exponents={k: float(v) for k, v in payload.get("exponents", {}).items()},
            details=dict(payload.get("details", {})),
        )


@dataclass
class SolveReport:
    """Outcome of one masked linear solve.

    ``residual_history`` records the preconditioned-system residual estimate
    at every inner iteration (monotone within a restart cycle by
    construction); ``final_weak_residual`` is the max over the nodal test
    basis of the weak-form defect of the returned iterate, relative to the
    right-hand side scale -- this is the number the acceptance tolerance
    refers to.
    """

    converged: bool
    iterations: int
    residual_history: list[float]
    final_weak_residual: float
    rhs_scale: float
    lam: float
    energy: dict[str, float] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "residual_history": _jsonable(self.residual_history),
            "final_weak_residual": _jsonable(self.final_weak_residual),
            "rhs_scale": _jsonable(self.rhs_scale),
            "lambda": _jsonable(self.lam),
            "energy": _jsonable(self.energy),
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SolveReport":
        return cls(
            converged=bool(payload["converged"]),
            iterations=int(payload["iterations"]),
            residual_history=[float(r) for r in payload["residual_history"]],
            final_weak_residual=float(payload["final_weak_residual"]),
            rhs_scale=float(payload["rhs_scale"]),
            lam=float(payload["lambda"]),
            energy={k: float(v) for k, v in payload.get("energy", {}).items()},
            details=dict(payload.get("details", {})),
        )


def report_from_dict(payload: Mapping[str, Any]) -> VerificationReport | SolveReport:
    """Dispatch on the payload shape (suites carry ``suite``, solves don't)."""
    if "suite" in payload:
        return VerificationReport.from_dict(payload)
    if "residual_history" in payload:
        return SolveReport.from_dict(payload)
    raise ValueError("payload is neither a verification nor a solve report")


def residual_block(abs_l1: float, abs_l2: float, abs_linf: float, scale: float) -> dict[str, float]:
    """Standard residuals dict from the three absolute norms and a scale."""
    return {
        "l1": float(abs_l1),
        "l2": float(abs_l2),
        "linf": float(abs_linf),
        "rel_l1": relative(float(abs_l1), float(scale)),
        "rel_l2": relative(float(abs_l2), float(scale)),
        "rel_linf": relative(float(abs_linf), float(scale)),
        "scale": float(scale),
    }
