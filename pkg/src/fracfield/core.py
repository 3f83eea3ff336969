"""Periodic grids, sampled fields, analytic field specs, and integration.

The spatial setting for the whole package: an axis-aligned box
``[lo_1, hi_1) x ... x [lo_n, hi_n)`` with periodic identification, n in
{1, 2}, discretized by ``N`` left-closed nodes per axis,

    x_j = lo + j * h,   h_i = (hi_i - lo_i) / N,   j = 0, ..., N-1.

``N`` is required to be a power of two (>= 8) so that both backends share one
grid family and the FFT sizes are fixed.  Fields are nodal samples stored
component-major: a ``GridField`` with ``k`` components holds an array of
shape ``(k, N)`` or ``(k, N, N)``; scalars have ``k = 1``.

Integration is the periodic rectangle rule ``h^n * sum(f)``, which is
spectrally accurate for smooth periodic integrands and makes the discrete
duality / summation-by-parts identities used elsewhere exact.

``FieldSpec`` describes the analytic test fields (gaussian, compactly
supported bump, plane wave, box/disk indicator, random trigonometric
polynomial).  ``random_smooth`` fields are *functions*, not grid data: the
Fourier coefficients are drawn once from the seed in a canonical mode order,
so resampling the same spec on a finer grid evaluates the same function --
refinement and drift studies rely on that.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = (
    "Grid",
    "GridField",
    "FieldSpec",
    "make_grid",
    "sample",
    "sample_vector",
    "integrate",
    "lp_norm",
    "inner_product",
    "field_to_dict",
    "field_from_dict",
    "read_field",
    "write_field",
    "atomic_write_text",
)

Array = np.ndarray


# =============================================================================
# Grid
# =============================================================================


@dataclass(frozen=True)
class Grid:
    """Periodic box ``[lo, hi)^n`` with ``N`` nodes per axis.

    Use :func:`make_grid` instead of the constructor; it normalizes and
    validates the arguments.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    N: int

    # -- geometry ------------------------------------------------------------

    @property
    def n(self) -> int:
        """Space dimension."""
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((h - l) / self.N for l, h in zip(self.lo, self.hi))

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for h in self.spacing:
            vol *= h
        return vol

    @property
    def diameter(self) -> float:
        """Euclidean diagonal of the box."""
        return math.sqrt(sum(w * w for w in self.widths))

    def axes(self) -> list[Array]:
        """Nodal coordinates per axis, ``x_j = lo + j h`` (left-closed)."""
        return [
            lo + h * np.arange(self.N) for lo, h in zip(self.lo, self.spacing)
        ]

    def meshgrid(self) -> tuple[Array, ...]:
        """Coordinate arrays of shape ``self.shape`` (``indexing='ij'``)."""
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))


def _as_coords(value: float | Sequence[float], n: int, name: str) -> tuple[float, ...]:
    """Broadcast a scalar to n axes, or validate a length-n sequence."""
    if isinstance(value, (int, float)):
        return (float(value),) * n
    coords = tuple(float(v) for v in value)
    if len(coords) != n:
        raise ValueError(f"{name} must have {n} entries, got {len(coords)}")
    return coords


def make_grid(
    n: int,
    lo: float | Sequence[float],
    hi: float | Sequence[float],
    N: int,
) -> Grid:
    """Build a validated periodic grid.

    Parameters
    ----------
    n : int
        Dimension, 1 or 2.
    lo, hi : float or sequence of float
        Box corners; scalars broadcast to all axes.  Each axis needs
        ``lo_i < hi_i``.
    N : int
        Nodes per axis.  Must be a power of two and at least 8 (both
        backends share one FFT-friendly grid family).

    Returns
    -------
    Grid

    Raises
    ------
    ValueError
        For unsupported dimension, degenerate boxes, or inadmissible ``N``
        (e.g. ``make_grid(1, 0, 1, 100)``).
    """
    if n not in (1, 2):
        raise ValueError(f"make_grid() supports n in {{1, 2}}, got n = {n!r}")
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise ValueError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 8 or (N & (N - 1)) != 0:
        raise ValueError(f"N must be a power of two >= 8, got N = {N}")
    lo_t = _as_coords(lo, n, "lo")
    hi_t = _as_coords(hi, n, "hi")
    for i, (a, b) in enumerate(zip(lo_t, hi_t)):
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"box corners must be finite, axis {i}: [{a}, {b}]")
        if not a < b:
            raise ValueError(f"degenerate box on axis {i}: [{a:g}, {b:g}]")
    return Grid(lo=lo_t, hi=hi_t, N=N)


# =============================================================================
# GridField
# =============================================================================


class GridField:
    """Nodal samples of a scalar or vector field on a :class:`Grid`.

    Data layout is component-major: ``data[c]`` is the component-``c`` array
    of shape ``grid.shape``.  Scalars are the ``k = 1`` case.  All entries
    must be finite.
    """

    __slots__ = ("grid", "data")

    def __init__(self, grid: Grid, data: Array):
        data = np.asarray(data, dtype=float)
        if data.ndim == grid.n:  # bare scalar array
            data = data[None, ...]
        if data.ndim != grid.n + 1 or data.shape[1:] != grid.shape:
            raise ValueError(
                f"data shape {data.shape} does not match grid shape "
                f"(k,) + {grid.shape}"
            )
        if data.shape[0] not in (1, grid.n):
            raise ValueError(
                f"fields have 1 or {grid.n} components, got {data.shape[0]}"
            )
        if not np.isfinite(data).all():
            raise ValueError("field data contains non-finite entries")
        self.grid = grid
        self.data = data

    # -- constructors ----------------------------------------------------

    @classmethod
    def scalar(cls, grid: Grid, values: Array) -> "GridField":
        return cls(grid, np.asarray(values, dtype=float)[None, ...])

    @classmethod
    def vector(cls, grid: Grid, components: Sequence[Array]) -> "GridField":
        return cls(grid, np.stack([np.asarray(c, dtype=float) for c in components]))

    @classmethod
    def zeros(cls, grid: Grid, components: int = 1) -> "GridField":
        return cls(grid, np.zeros((components,) + grid.shape))

    # -- views -------------------------------------------------------------

    @property
    def components(self) -> int:
        return self.data.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.components == 1

    @property
    def values(self) -> Array:
        """The scalar value array (raises for vector fields)."""
        if not self.is_scalar:
            raise ValueError("values is only defined for scalar fields")
        return self.data[0]

    def component(self, i: int) -> "GridField":
        return GridField.scalar(self.grid, self.data[i])

    def copy(self) -> "GridField":
        return GridField(self.grid, self.data.copy())

    # -- arithmetic (same grid, compatible components) -----------------------

    def _coerce(self, other: "GridField | float") -> Array:
        if isinstance(other, GridField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.data
        return np.asarray(float(other))

    def __add__(self, other: "GridField | float") -> "GridField":
        return GridField(self.grid, self.data + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: "GridField | float") -> "GridField":
        return GridField(self.grid, self.data - self._coerce(other))

    def __rsub__(self, other: float) -> "GridField":
        return GridField(self.grid, self._coerce(other) - self.data)

    def __mul__(self, other: "GridField | float") -> "GridField":
        # scalar * vector broadcasts over components
        return GridField(self.grid, self.data * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: float) -> "GridField":
        return GridField(self.grid, self.data / float(other))

    def __neg__(self) -> "GridField":
        return GridField(self.grid, -self.data)

    def dot(self, other: "GridField") -> "GridField":
        """Pointwise dot product of two vector fields (scalar result)."""
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        if self.components != other.components:
            raise ValueError("dot() needs matching component counts")
        return GridField.scalar(self.grid, np.einsum("c...,c...->...", self.data, other.data))

    def magnitude(self) -> Array:
        """Pointwise Euclidean magnitude (plain array, grid shape)."""
        if self.is_scalar:
            return np.abs(self.data[0])
        return np.sqrt(np.einsum("c...,c...->...", self.data, self.data))

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return (
            f"GridField(n={self.grid.n}, N={self.grid.N}, "
            f"components={self.components})"
        )


# =============================================================================
# FieldSpec and samplers
# =============================================================================

_KINDS = ("constant", "gaussian", "bump", "plane_wave", "indicator", "random_smooth")


@dataclass(frozen=True)
class FieldSpec:
    """Analytic description of a test field (kind + parameters).

    Build specs with the classmethods; ``sample`` turns a spec into nodal
    data on a grid.  Specs are grid-free, so the same spec can be sampled at
    several resolutions for refinement studies.
    """

    kind: str
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(
                f"unknown field kind {self.kind!r}; valid kinds: {', '.join(_KINDS)}"
            )

    # -- constructors ------------------------------------------------------

    @staticmethod
    def _freeze(**kw: Any) -> tuple[tuple[str, Any], ...]:
        return tuple(sorted(kw.items()))

    @classmethod
    def constant(cls, c: float) -> "FieldSpec":
        return cls("constant", cls._freeze(c=float(c)))

    @classmethod
    def gaussian(
        cls,
        center: float | Sequence[float],
        sigma: float,
        amplitude: float = 1.0,
    ) -> "FieldSpec":
        """``A exp(-|x - c|^2 / (2 sigma^2))``."""
        if sigma <= 0:
            raise ValueError(f"gaussian needs sigma > 0, got {sigma:g}")
        c = tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist())
        return cls("gaussian", cls._freeze(center=c, sigma=float(sigma), amplitude=float(amplitude)))

    @classmethod
    def bump(
        cls,
        center: float | Sequence[float],
        radius: float,
        amplitude: float = 1.0,
    ) -> "FieldSpec":
        """Smooth compactly supported bump ``A exp(1 - 1/(1 - t^2))``, ``t = |x-c|/r``.

        Exactly zero outside the closed ball of the given radius.
        """
        if radius <= 0:
            raise ValueError(f"bump needs radius > 0, got {radius:g}")
        c = tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist())
        return cls("bump", cls._freeze(center=c, radius=float(radius), amplitude=float(amplitude)))

    @classmethod
    def plane_wave(
        cls, k: int | Sequence[int], phase: float = 0.0
    ) -> "FieldSpec":
        """``cos(2 pi k . (x - lo) / L + phase)`` -- an exact lattice mode."""
        kk = tuple(int(v) for v in np.atleast_1d(np.asarray(k)))
        return cls("plane_wave", cls._freeze(k=kk, phase=float(phase)))

    @classmethod
    def indicator(
        cls, a: float | Sequence[float], b: float | Sequence[float]
    ) -> "FieldSpec":
        """Indicator of the half-open box ``[a, b)`` (per axis)."""
        aa = tuple(np.atleast_1d(np.asarray(a, dtype=float)).tolist())
        bb = tuple(np.atleast_1d(np.asarray(b, dtype=float)).tolist())
        if len(aa) != len(bb):
            raise ValueError("indicator endpoints must have matching dimension")
        for lo_i, hi_i in zip(aa, bb):
            if not lo_i < hi_i:
                raise ValueError(f"indicator needs a < b per axis, got [{lo_i:g}, {hi_i:g}]")
        return cls("indicator", cls._freeze(a=aa, b=bb))

    @classmethod
    def indicator_disk(
        cls, center: float | Sequence[float], radius: float
    ) -> "FieldSpec":
        """Indicator of the open ball ``|x - c| < r``."""
        if radius <= 0:
            raise ValueError(f"indicator disk needs radius > 0, got {radius:g}")
        c = tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist())
        return cls("indicator", cls._freeze(center=c, radius=float(radius)))

    @classmethod
    def random_smooth(cls, seed: int, modes: int = 6, decay: float = 3.0) -> "FieldSpec":
        """Random trigonometric polynomial with coefficient decay ``(1+|k|)^-decay``.

        The coefficients are drawn once from ``seed`` in a canonical mode
        order, so the spec denotes a fixed smooth periodic *function*:
        sampling it on finer grids evaluates the same function.  Mean-zero.
        """
        if modes < 1:
            raise ValueError(f"random_smooth needs modes >= 1, got {modes}")
        if decay <= 1.0:
            raise ValueError(f"random_smooth needs decay > 1, got {decay:g}")
        return cls("random_smooth", cls._freeze(seed=int(seed), modes=int(modes), decay=float(decay)))

    # -- (de)serialization ---------------------------------------------------

    @property
    def p(self) -> dict[str, Any]:
        return dict(self.params)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.p}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FieldSpec":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind == "constant":
            return cls.constant(d["c"])
        if kind == "gaussian":
            return cls.gaussian(d["center"], d["sigma"], d.get("amplitude", 1.0))
        if kind == "bump":
            return cls.bump(d["center"], d["radius"], d.get("amplitude", 1.0))
        if kind == "plane_wave":
            return cls.plane_wave(d["k"], d.get("phase", 0.0))
        if kind == "indicator":
            if "center" in d:
                return cls.indicator_disk(d["center"], d["radius"])
            return cls.indicator(d["a"], d["b"])
        if kind == "random_smooth":
            return cls.random_smooth(d["seed"], d.get("modes", 6), d.get("decay", 3.0))
        raise ValueError(
            f"unknown field kind {kind!r}; valid kinds: {', '.join(_KINDS)}"
        )


def _spec_center(params: dict[str, Any], n: int, name: str) -> np.ndarray:
    c = np.asarray(params["center"], dtype=float)
    if c.size == 1 and n > 1:
        c = np.full(n, float(c))
    if c.size != n:
        raise ValueError(f"{name} center has dimension {c.size}, grid has {n}")
    return c.reshape(n)


def _check_support_inside(lo, hi, c, r, what: str) -> None:
    for i in range(len(lo)):
        if c[i] - r < lo[i] or c[i] + r > hi[i]:
            raise ValueError(
                f"{what} support [{c[i] - r:g}, {c[i] + r:g}] exceeds box "
                f"[{lo[i]:g}, {hi[i]:g}] on axis {i}"
            )


def sample(spec: FieldSpec, grid: Grid) -> GridField:
    """Sample an analytic :class:`FieldSpec` on the nodes of ``grid``.

    Compactly supported kinds (bump, indicator) must fit inside the box;
    otherwise a ``ValueError`` is raised -- on a periodic box a field
    sticking out the far side would silently wrap.

    Returns
    -------
    GridField
        Scalar field (one component).
    """
    p = spec.p
    n = grid.n
    X = grid.meshgrid()

    if spec.kind == "constant":
        return GridField.scalar(grid, np.full(grid.shape, p["c"]))

    if spec.kind == "gaussian":
        c = _spec_center(p, n, "gaussian")
        r2 = sum((X[i] - c[i]) ** 2 for i in range(n))
        return GridField.scalar(grid, p["amplitude"] * np.exp(-r2 / (2.0 * p["sigma"] ** 2)))

    if spec.kind == "bump":
        c = _spec_center(p, n, "bump")
        r = p["radius"]
        _check_support_inside(grid.lo, grid.hi, c, r, "bump")
        t2 = sum((X[i] - c[i]) ** 2 for i in range(n)) / (r * r)
        out = np.zeros(grid.shape)
        inside = t2 < 1.0
        with np.errstate(divide="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - t2[inside]))
        return GridField.scalar(grid, p["amplitude"] * out)

    if spec.kind == "plane_wave":
        k = np.asarray(p["k"], dtype=float)
        if k.size == 1 and n > 1:
            raise ValueError(f"plane_wave k has dimension {k.size}, grid has {n}")
        if k.size != n:
            raise ValueError(f"plane_wave k has dimension {k.size}, grid has {n}")
        phase = sum(
            2.0 * math.pi * k[i] * (X[i] - grid.lo[i]) / grid.widths[i] for i in range(n)
        )
        return GridField.scalar(grid, np.cos(phase + p["phase"]))

    if spec.kind == "indicator":
        if "center" in p:
            c = _spec_center(p, n, "indicator disk")
            r = p["radius"]
            _check_support_inside(grid.lo, grid.hi, c, r, "indicator disk")
            r2 = sum((X[i] - c[i]) ** 2 for i in range(n))
            return GridField.scalar(grid, (r2 < r * r).astype(float))
        a = np.atleast_1d(np.asarray(p["a"], dtype=float))
        b = np.atleast_1d(np.asarray(p["b"], dtype=float))
        if a.size != n:
            raise ValueError(f"indicator endpoints have dimension {a.size}, grid has {n}")
        for i in range(n):
            if a[i] < grid.lo[i] or b[i] > grid.hi[i]:
                raise ValueError(
                    f"indicator support [{a[i]:g}, {b[i]:g}] exceeds box "
                    f"[{grid.lo[i]:g}, {grid.hi[i]:g}] on axis {i}"
                )
        mask = np.ones(grid.shape, dtype=bool)
        for i in range(n):
            mask &= (X[i] >= a[i]) & (X[i] < b[i])  # half-open [a, b)
        return GridField.scalar(grid, mask.astype(float))

    if spec.kind == "random_smooth":
        return GridField.scalar(grid, _sample_random_smooth(p, grid))

    raise ValueError(f"unknown field kind {spec.kind!r}")  # pragma: no cover


def _random_smooth_modes(n: int, modes: int) -> list[tuple[int, ...]]:
    """Canonical half-lattice mode order (one representative per +/-k pair)."""
    if n == 1:
        return [(k,) for k in range(1, modes + 1)]
    out: list[tuple[int, ...]] = []
    for k1 in range(0, modes + 1):
        for k2 in range(-modes, modes + 1):
            if k1 > 0 or k2 > 0:
                out.append((k1, k2))
    return out


def _sample_random_smooth(p: dict[str, Any], grid: Grid) -> Array:
    """Evaluate the seeded trig polynomial at the grid nodes.

    Coefficients are drawn in the canonical order before any grid data is
    touched, so the function is independent of the resolution.
    """
    rng = np.random.default_rng(p["seed"])
    mode_list = _random_smooth_modes(grid.n, p["modes"])
    coefs = rng.standard_normal((len(mode_list), 2))
    X = grid.meshgrid()
    t = [
        2.0 * math.pi * (X[i] - grid.lo[i]) / grid.widths[i] for i in range(grid.n)
    ]
    out = np.zeros(grid.shape)
    for (ab, k) in zip(coefs, mode_list):
        scale = (1.0 + math.sqrt(sum(ki * ki for ki in k))) ** (-p["decay"])
        phase = sum(ki * ti for ki, ti in zip(k, t))
        out += scale * (ab[0] * np.cos(phase) + ab[1] * np.sin(phase))
    return out


def sample_vector(specs: Sequence[FieldSpec], grid: Grid) -> GridField:
    """Sample one spec per component into a vector field."""
    comps = [sample(s, grid).values for s in specs]
    if len(comps) != grid.n:
        raise ValueError(f"vector fields need {grid.n} components, got {len(comps)}")
    return GridField.vector(grid, comps)


# =============================================================================
# Integration and norms
# =============================================================================


def integrate(f: GridField) -> float:
    """Periodic rectangle rule ``h^n * sum(f)`` for a scalar field."""
    if not f.is_scalar:
        raise ValueError("integrate() expects a scalar field")
    return float(f.grid.cell_volume * np.sum(f.data[0]))


def lp_norm(f: GridField, p: float) -> float:
    """Discrete ``L^p`` norm; vector fields use the pointwise Euclidean magnitude.

    ``p`` must satisfy ``p >= 1`` or be ``inf``.
    """
    mag = f.magnitude()
    if p == math.inf or p == np.inf:
        return float(np.max(mag))
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"lp_norm() needs p >= 1 or p = inf, got p = {p:g}")
    return float((f.grid.cell_volume * np.sum(mag**p)) ** (1.0 / p))


def inner_product(f: GridField, g: GridField) -> float:
    """``h^n * sum(f g)``; vector fields pair with the pointwise dot product."""
    if f.grid != g.grid:
        raise ValueError("inner_product() needs both fields on the same grid")
    if f.components != g.components:
        raise ValueError(
            f"inner_product() needs matching components "
            f"({f.components} vs {g.components})"
        )
    return float(f.grid.cell_volume * np.sum(f.data * g.data))


# =============================================================================
# JSON field files
# =============================================================================


def field_to_dict(f: GridField) -> dict[str, Any]:
    """Portable dict form: row-major data, component-major ordering."""
    return {
        "dim": f.grid.n,
        "lo": list(f.grid.lo),
        "hi": list(f.grid.hi),
        "N": f.grid.N,
        "components": f.components,
        "data": f.data.ravel(order="C").tolist(),
    }


def field_from_dict(d: dict[str, Any]) -> GridField:
    """Inverse of :func:`field_to_dict`; validates shape and data length."""
    if not isinstance(d, dict):
        raise ValueError(f"field document must be a JSON object, got {type(d).__name__}")
    missing = [k for k in ("dim", "lo", "hi", "N", "components", "data") if k not in d]
    if missing:
        raise ValueError(f"field document missing keys: {', '.join(missing)}")
    grid = make_grid(int(d["dim"]), d["lo"], d["hi"], d["N"])
    k = int(d["components"])
    if k not in (1, grid.n):
        raise ValueError(f"components must be 1 or {grid.n}, got {k}")
    data = np.asarray(d["data"], dtype=float)
    expected = k * grid.N**grid.n
    if data.ndim != 1 or data.size != expected:
        raise ValueError(
            f"data length {data.size} does not match components*N^dim = {expected}"
        )
    return GridField(grid, data.reshape((k,) + grid.shape))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write text atomically: temp file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_field(f: GridField, path: str | os.PathLike) -> None:
    """Serialize a field to JSON (atomic write)."""
    atomic_write_text(path, json.dumps(field_to_dict(f)) + "\n")


def read_field(path: str | os.PathLike) -> GridField:
    """Read a JSON field file written by :func:`write_field`."""
    with open(path) as fh:
        return field_from_dict(json.load(fh))
