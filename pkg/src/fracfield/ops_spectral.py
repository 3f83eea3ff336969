"""Fourier-multiplier backend for the fractional operator family.

On the periodic box the fractional operators are Fourier multipliers on the
integer frequency lattice ``xi_k = k / L`` (cycles per unit length):

    fractional Laplacian of order s      :  |2 pi xi|^s
    fractional gradient,  component j    :  (2 pi i xi_j) |2 pi xi|^(alpha-1)
    fractional divergence                :  sum_j of the gradient symbols
    Riesz transform, component j         :  i xi_j / |xi|

All symbols vanish at ``xi = 0`` (the operators annihilate constants and
return mean-zero fields).  Real-valuedness is enforced structurally: fields
travel through ``rfftn``/``irfftn`` and the odd (purely imaginary) symbols
are set to zero on their Nyquist planes ``|k_j| = N/2`` -- exact Hermitian
symmetrization of those symbols yields zero there, so this *is* the
symmetrized symbol, not a filter.

The two-field ("nonlocal") operators and the Leibniz-defect form are exact
rearrangements of the one-field operators:

    nl_gradient(f, g)   = grad(f g) - f grad(g) - g grad(f)
    nl_divergence(f, p) = div(f p)  - p . grad(f) - f div(p)
    H_alpha(f, g)       = Lap(f g)  - f Lap(g)  - g Lap(f)

which is also how their singular-integral definitions expand, increment by
increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, GridField

__all__ = (
    "Multiplier",
    "laplacian_multiplier",
    "gradient_multipliers",
    "riesz_multipliers",
    "frac_laplacian_spec",
    "frac_gradient_spec",
    "frac_divergence_spec",
    "riesz",
    "riesz_commutator",
    "H_alpha",
    "nl_gradient_spec",
    "nl_divergence_spec",
)

Array = np.ndarray


# =============================================================================
# frequency lattice and Multiplier
# =============================================================================


def _wavenumbers(grid: Grid) -> list[Array]:
    """Integer wavenumbers per axis on the rfftn lattice (broadcastable)."""
    N = grid.N
    ks: list[Array] = []
    for axis in range(grid.n):
        if axis == grid.n - 1:  # rfft axis: 0 .. N/2
            k = np.arange(N // 2 + 1, dtype=float)
        else:  # full fft axis: 0 .. N/2-1, -N/2 .. -1
            k = np.fft.fftfreq(N, d=1.0 / N)
        shape = [1] * grid.n
        shape[axis] = k.size
        ks.append(k.reshape(shape))
    return ks


def _angular_frequencies(grid: Grid) -> tuple[list[Array], Array]:
    """Per-axis ``2 pi k_j / L_j`` plus the Euclidean magnitude ``|2 pi xi|``."""
    ks = _wavenumbers(grid)
    txi = [2.0 * math.pi * k / w for k, w in zip(ks, grid.widths)]
    mag = np.sqrt(sum(t * t for t in txi))
    return txi, mag


def _nyquist_mask(grid: Grid, axis: int) -> Array:
    """Boolean mask of the plane ``|k_axis| = N/2`` (broadcastable)."""
    ks = _wavenumbers(grid)
    return np.abs(ks[axis]) == grid.N / 2.0


@dataclass(frozen=True)
class Multiplier:
    """A scalar Fourier multiplier on the rfftn lattice of one grid.

    ``symbol`` is broadcastable to the rfftn spectrum shape.  ``apply``
    transforms a scalar field, multiplies, and transforms back; outputs are
    exactly real by construction.
    """

    grid: Grid
    symbol: Array

    def apply(self, f: GridField) -> GridField:
        if f.grid != self.grid:
            raise ValueError("field and multiplier live on different grids")
        if not f.is_scalar:
            raise ValueError("Multiplier.apply expects a scalar field")
        spec = np.fft.rfftn(f.values)
        axes = tuple(range(self.grid.n))
        out = np.fft.irfftn(spec * self.symbol, s=self.grid.shape, axes=axes)
        return GridField.scalar(self.grid, out)


def _check_order(value: float, lo: float, hi: float, name: str) -> float:
    value = float(value)
    if not (lo < value < hi):
        raise ValueError(f"{name} must lie strictly inside ({lo:g}, {hi:g}), got {value:g}")
    return value


def laplacian_multiplier(grid: Grid, s: float) -> Multiplier:
    """Symbol ``|2 pi xi|^s`` of the fractional Laplacian of order ``s in (0, 2)``."""
    s = _check_order(s, 0.0, 2.0, "order s")
    _, mag = _angular_frequencies(grid)
    return Multiplier(grid, mag**s)  # mag = 0 at the origin gives symbol 0


def gradient_multipliers(grid: Grid, alpha: float) -> list[Multiplier]:
    """Component symbols ``(2 pi i xi_j) |2 pi xi|^(alpha - 1)``.

    The odd symbols vanish on their Nyquist planes; that value is what exact
    Hermitian symmetrization assigns there.
    """
    alpha = _check_order(alpha, 0.0, 1.0, "alpha")
    txi, mag = _angular_frequencies(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(mag > 0.0, mag ** (alpha - 1.0), 0.0)
    out = []
    for j in range(grid.n):
        sym = 1j * txi[j] * radial
        sym = np.where(_nyquist_mask(grid, j), 0.0, sym)
        out.append(Multiplier(grid, sym))
    return out


def riesz_multipliers(grid: Grid) -> list[Multiplier]:
    """Component symbols ``i xi_j / |xi|`` of the Riesz transform."""
    txi, mag = _angular_frequencies(grid)
    out = []
    for j in range(grid.n):
        with np.errstate(divide="ignore", invalid="ignore"):
            sym = np.where(mag > 0.0, 1j * txi[j] / np.where(mag > 0.0, mag, 1.0), 0.0)
        sym = np.where(_nyquist_mask(grid, j), 0.0, sym)
        out.append(Multiplier(grid, sym))
    return out


# =============================================================================
# one-field operators
# =============================================================================


def frac_laplacian_spec(f: GridField, alpha: float) -> GridField:
    """Fractional Laplacian of order ``alpha`` via its symbol ``|2 pi xi|^alpha``.

    ``alpha`` may range over (0, 2): the operator family is closed under
    composition (orders add), and order ``2 alpha`` is exactly the
    negative of divergence-of-gradient at order ``alpha``.
    """
    return laplacian_multiplier(f.grid, alpha).apply(f)


def frac_gradient_spec(f: GridField, alpha: float) -> GridField:
    """Fractional gradient (vector field) of a scalar field."""
    if not f.is_scalar:
        raise ValueError("frac_gradient_spec expects a scalar field")
    ms = gradient_multipliers(f.grid, alpha)
    return GridField.vector(f.grid, [m.apply(f).values for m in ms])


def frac_divergence_spec(phi: GridField, alpha: float) -> GridField:
    """Fractional divergence (scalar field) of a vector field.

    Exact negative adjoint of :func:`frac_gradient_spec` in the grid inner
    product.
    """
    grid = phi.grid
    if phi.components != grid.n:
        raise ValueError(
            f"frac_divergence_spec expects {grid.n} components, got {phi.components}"
        )
    ms = gradient_multipliers(grid, alpha)
    out = np.zeros(grid.shape)
    for j in range(grid.n):
        out = out + ms[j].apply(phi.component(j)).values
    return GridField.scalar(grid, out)


def riesz(f: GridField) -> GridField:
    """Riesz transform (vector field) of a scalar field.

    Satisfies ``sum_j R_j(R_j f) = -(f - mean f)`` and intertwines the
    fractional Laplacian with the fractional gradient:
    ``R((-Lap)^(a/2) f) = grad^a f``.
    """
    if not f.is_scalar:
        raise ValueError("riesz expects a scalar field")
    ms = riesz_multipliers(f.grid)
    return GridField.vector(f.grid, [m.apply(f).values for m in ms])


# =============================================================================
# two-field operators
# =============================================================================


def _pointwise(f: GridField, g: GridField) -> GridField:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if not (f.is_scalar and g.is_scalar):
        raise ValueError("expected two scalar fields")
    return GridField.scalar(f.grid, f.values * g.values)


def nl_gradient_spec(f: GridField, g: GridField, alpha: float) -> GridField:
    """Two-field (nonlocal) gradient: ``grad(fg) - f grad(g) - g grad(f)``.

    This rearrangement is exactly how the product-of-increments singular
    integral expands, so it is the spectral twin of the direct operator.
    """
    fg = _pointwise(f, g)
    out = frac_gradient_spec(fg, alpha).data.copy()
    out -= f.values[None] * frac_gradient_spec(g, alpha).data
    out -= g.values[None] * frac_gradient_spec(f, alpha).data
    return GridField(f.grid, out)


def nl_divergence_spec(f: GridField, phi: GridField, alpha: float) -> GridField:
    """Two-field (nonlocal) divergence: ``div(f phi) - phi . grad(f) - f div(phi)``."""
    if f.grid != phi.grid:
        raise ValueError("fields live on different grids")
    if not f.is_scalar:
        raise ValueError("nl_divergence_spec expects a scalar first argument")
    if phi.components != f.grid.n:
        raise ValueError(
            f"nl_divergence_spec expects {f.grid.n} components, got {phi.components}"
        )
    fphi = GridField(f.grid, f.values[None] * phi.data)
    out = frac_divergence_spec(fphi, alpha).values.copy()
    grad_f = frac_gradient_spec(f, alpha)
    out -= np.sum(phi.data * grad_f.data, axis=0)
    out -= f.values * frac_divergence_spec(phi, alpha).values
    return GridField.scalar(f.grid, out)


def H_alpha(f: GridField, g: GridField, alpha: float) -> GridField:
    """Leibniz defect of the fractional Laplacian:
    ``H(f, g) = Lap(fg) - f Lap(g) - g Lap(f)`` (symmetric, vanishes when
    either argument is constant)."""
    fg = _pointwise(f, g)
    out = frac_laplacian_spec(fg, alpha).values.copy()
    out -= f.values * frac_laplacian_spec(g, alpha).values
    out -= g.values * frac_laplacian_spec(f, alpha).values
    return GridField.scalar(f.grid, out)


def riesz_commutator(f: GridField, g: GridField) -> GridField:
    """Commutator of the Riesz transform with multiplication:
    ``[R, f] g = R(fg) - f R(g)`` (vector field; vanishes for constant f)."""
    fg = _pointwise(f, g)
    out = riesz(fg).data.copy()
    out -= f.values[None] * riesz(g).data
    return GridField(f.grid, out)
