"""fracfield: fractional-order vector calculus on periodic grids.

The package provides two interchangeable discretizations of the fractional
gradient / divergence / Laplacian family and their nonlocal (two-field)
variants -- a singular-integral quadrature backend (:mod:`fracfield.ops_direct`)
and a Fourier-multiplier backend (:mod:`fracfield.ops_spectral`) -- together
with Besov/Sobolev-type seminorms (:mod:`fracfield.besov`), a battery of
identity and inequality verification suites (:mod:`fracfield.identities`),
and a nonlocal elliptic solver with certified energy estimates
(:mod:`fracfield.pde`).  The :mod:`fracfield.cli` module exposes all of it as
the ``fracfield`` command.

Top-level names resolve lazily on first access: importing the bare package
does not pull in the numeric stack, so the command-line entry point can
configure thread pools before numpy initializes.
"""

from __future__ import annotations

import importlib
from typing import Any

__version__ = "0.1.0"

# name -> home module, resolved on first attribute access
_EXPORTS = {
    "Grid": "core",
    "GridField": "core",
    "FieldSpec": "core",
    "make_grid": "core",
    "sample": "core",
    "sample_vector": "core",
    "integrate": "core",
    "lp_norm": "core",
    "inner_product": "core",
    "read_field": "core",
    "write_field": "core",
    "FracConstants": "special",
    "constants": "special",
    "gamma": "special",
    "SeminormResult": "besov",
    "besov_seminorm": "besov",
    "sobolev_frac_seminorm": "besov",
    "bmo_seminorm": "besov",
    "verify_leibniz": "identities",
    "verify_duality": "identities",
    "verify_nl_duality": "identities",
    "verify_swap": "identities",
    "verify_zero_mean": "identities",
    "verify_gauss_green": "identities",
    "verify_kpv": "identities",
    "verify_crw": "identities",
    "verify_nl_bound": "identities",
    "VerificationReport": "reports",
    "SolveReport": "reports",
    "report_from_dict": "reports",
    "EllipticProblem": "pde",
    "make_problem": "pde",
    "problem_from_dict": "pde",
    "read_problem": "pde",
    "apply_L": "pde",
    "bilinear_form": "pde",
    "solve": "pde",
    "check_energy": "pde",
    "poincare_ratio": "pde",
}

__all__ = ("__version__", *sorted(_EXPORTS))


def __getattr__(name: str) -> Any:
    home = _EXPORTS.get(name)
    if home is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    value = getattr(importlib.import_module(f".{home}", __name__), name)
    globals()[name] = value  # cache for subsequent lookups
    return value


def __dir__() -> list[str]:
    return sorted(__all__)
