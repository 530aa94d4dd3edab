"""Radial grids and the logarithmic Riesz potential.

In dimension ``n = 2m`` the operator ``(-Delta)^m`` has the fundamental
solution ``log(1/|x|) / gamma_m``, so inverting it on a zero-mean radial
density amounts to integrating the density against the spherical mean of
``log|x - y|``:

    Lambda_n(s, r) = mean over |y| = r of log|s e - y|,  |e| = 1.

This module provides the radial grids (nodes plus quadrature weights for
the measure ``omega_{n-1} r^{n-1} dr``), the ring kernel ``Lambda_n``, its
dense matrix on a grid, and the potential application

    (potential f)(r_i) = -(1/gamma_m) * integral Lambda_n(r_i, rho) f(rho) dmu(rho).

Quadrature design
-----------------
Grid weights integrate the piecewise-linear interpolant of the integrand
against the exact measure, so they are strictly positive and reproduce
``vol(B_R)`` exactly on constants.  The kernel matrix stores the point
values ``Lambda_n(r_i, r_j)`` (exactly symmetric), but the potential is
applied through a companion table of hat-basis integrals

    A[i][j] = integral phi_j(rho) Lambda_n(r_i, rho) dmu(rho),

computed per interval by Gauss-Legendre at assembly time.  The kernel has
a curvature kink on the diagonal ``s = r``; integrating it against the
same piecewise-linear basis that defines the weights keeps that kink's
quadrature error at the level of the interpolation error instead of
letting the point rule's local error survive into the applied potential,
where repeated differencing would amplify it.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch

_KERNEL_CACHE_TAG = b"qcurv-kernel-v1"


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int, radius: float) -> float:
    return sphere_area(n) * radius**n / n


# ----------------------------------------------------------------------
# grids
# ----------------------------------------------------------------------
def _hat_weights(nodes: np.ndarray, n: int) -> np.ndarray:
    """Quadrature weights integrating the piecewise-linear interpolant
    against the measure omega_{n-1} r^{n-1} dr, exactly per interval."""
    om = sphere_area(n)
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    i0 = (b**n - a**n) / n
    i1 = (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    w = np.zeros_like(nodes)
    w[:-1] += om * (b * i0 - i1) / h
    w[1:] += om * (i1 - a * i0) / h
    return w


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Nodes ``0 = r_0 < r_1 < ... < r_N = R_max`` with positive weights
    for the measure ``omega_{2m-1} r^{2m-1} dr`` on the ball ``B_{R_max}``.

    Weights sum to ``vol(B_{R_max})`` exactly (a final normalization
    enforces it).  Construct through :func:`make_grid`.
    """

    m: int
    map_kind: str
    nodes: np.ndarray
    quad_weights: np.ndarray
    sinh_strength: float = 3.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.quad_weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise GridMismatch("nodes and weights must be 1-d and congruent")
        if len(nodes) < 65:
            raise GridMismatch(f"need at least 64 intervals, got {len(nodes) - 1}")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0):
            raise GridMismatch("nodes must start at 0 and increase strictly")
        if np.any(weights <= 0):
            raise GridMismatch("quadrature weights must be positive")
        vol = ball_volume(self.n, float(nodes[-1]))
        if abs(weights.sum() / vol - 1.0) > 1e-10:
            raise GridMismatch("weights do not reproduce the ball volume")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "quad_weights", weights)

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_intervals(self) -> int:
        return len(self.nodes) - 1

    def ensure_same(self, other: "RadialGrid") -> None:
        if other is self:
            return
        if (
            other.m != self.m
            or len(other.nodes) != len(self.nodes)
            or not np.array_equal(other.nodes, self.nodes)
        ):
            raise GridMismatch("fields live on different radial grids")

    def nearest_index(self, r: float) -> int:
        """Index of the node closest to radius ``r``."""
        if not 0.0 <= r <= self.r_max:
            raise GridMismatch(f"radius {r} outside [0, {self.r_max}]")
        return int(np.argmin(np.abs(self.nodes - r)))

    def weights_within(self, index: int) -> np.ndarray:
        """Weights of the same piecewise-linear rule restricted to the
        ball of radius ``nodes[index]``; entries beyond ``index`` are 0.

        Built from the stored (normalized) weights, removing only the
        boundary hat's contribution from the first outside interval, so
        that :meth:`weights_beyond` is exactly zero inside the ball —
        tail quadratures must not pick up rounding residue from the
        large interior weights."""
        w = np.zeros_like(self.quad_weights)
        if index == 0:
            return w
        w[: index + 1] = self.quad_weights[: index + 1]
        if index < len(self.nodes) - 1:
            om = sphere_area(self.n)
            a, b = float(self.nodes[index]), float(self.nodes[index + 1])
            i0 = (b**self.n - a**self.n) / self.n
            i1 = (b ** (self.n + 1) - a ** (self.n + 1)) / (self.n + 1)
            w[index] -= om * (b * i0 - i1) / (b - a)
        return w

    def weights_beyond(self, index: int) -> np.ndarray:
        """Exact complement of :meth:`weights_within` (annulus rule)."""
        return self.quad_weights - self.weights_within(index)

    def structure_key(self) -> str:
        """Hash of everything the kernel matrix depends on besides the
        quadrature order; used for cache file naming."""
        h = hashlib.sha256()
        h.update(_KERNEL_CACHE_TAG)
        h.update(self.n.to_bytes(4, "little"))
        h.update(self.nodes.tobytes())
        return h.hexdigest()


def make_grid(
    m: int,
    r_max: float,
    n_intervals: int,
    map_kind: str = "sinh-clustered",
    sinh_strength: float = 3.0,
) -> RadialGrid:
    """Build a radial grid on ``[0, r_max]`` with ``n_intervals + 1`` nodes.

    ``sinh-clustered`` places nodes at ``r_max * sinh(c xi)/sinh(c)`` for
    uniform ``xi``, concentrating resolution near the origin (where the
    curvature densities peak) while keeping a long tail; ``uniform`` is
    plain equispacing.  ``sinh_strength`` is the clustering parameter c;
    larger values trade tail resolution for origin resolution, and
    volume-accuracy-critical callers may need finer grids or stronger
    clustering than the defaults (the weights are exact for piecewise
    linear integrands, so the quadrature error is second order in the
    local spacing).
    """
    if m < 1 or m > 6:
        raise GridMismatch(f"m must be in 1..6, got {m}")
    if not r_max > 1.0:
        raise GridMismatch(f"r_max must exceed 1, got {r_max}")
    if n_intervals < 64:
        raise GridMismatch(f"need n_intervals >= 64, got {n_intervals}")
    if map_kind not in ("uniform", "sinh-clustered"):
        raise GridMismatch(f"unknown map_kind {map_kind!r}")
    if not sinh_strength > 0:
        raise GridMismatch("sinh_strength must be positive")
    xi = np.linspace(0.0, 1.0, n_intervals + 1)
    if map_kind == "uniform":
        nodes = r_max * xi
    else:
        nodes = r_max * np.sinh(sinh_strength * xi) / math.sinh(sinh_strength)
    nodes[0], nodes[-1] = 0.0, r_max
    weights = _hat_weights(nodes, 2 * m)
    weights *= ball_volume(2 * m, r_max) / weights.sum()
    return RadialGrid(
        m=m,
        map_kind=map_kind,
        nodes=nodes,
        quad_weights=weights,
        sinh_strength=float(sinh_strength),
    )


@dataclass(frozen=True, eq=False)
class RadialField:
    """Values of a radial function on a grid's nodes.

    ``valid`` optionally masks nodes whose values are artifacts of
    finite-difference boundary handling; ``None`` means all nodes valid.
    """

    grid: RadialGrid
    values: np.ndarray
    valid: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise GridMismatch("field values do not match the grid size")
        if not np.all(np.isfinite(values)):
            raise GridMismatch("field values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if self.valid is not None:
            valid = np.asarray(self.valid, dtype=bool)
            if valid.shape != values.shape:
                raise GridMismatch("validity mask does not match the grid size")
            valid.flags.writeable = False
            object.__setattr__(self, "valid", valid)

    def valid_mask(self) -> np.ndarray:
        if self.valid is None:
            return np.ones_like(self.values, dtype=bool)
        return self.valid


def field_to_csv(field: RadialField, path: str) -> None:
    """Two-column full-precision CSV: header ``r,value``."""
    with open(path, "w") as fh:
        fh.write("r,value\n")
        for r, v in zip(field.grid.nodes, field.values):
            fh.write(f"{r:.17g},{v:.17g}\n")


# ----------------------------------------------------------------------
# ring kernel
# ----------------------------------------------------------------------
def _ring_closed_coeffs(n: int) -> dict[int, float]:
    """Coefficients of the closed form
    Lambda_n(s,r) = log max(s,r) - sum_j coef[2j] * (min/max)^{2j},
    obtained by expanding log|s e - y| in the angular cosine and
    integrating the resulting trigonometric powers exactly."""
    cn = math.gamma(n / 2.0) / (math.sqrt(math.pi) * math.gamma((n - 1) / 2.0))
    coefs: dict[int, float] = {}
    for j in range(1, (n - 2) // 2 + 1):
        a = (
            cn
            * math.pi
            * (-1) ** j
            * math.comb(n - 2, (n - 2) // 2 - j)
            / 2 ** (n - 2)
        )
        coefs[2 * j] = a / (2 * j)
    return coefs


def _ring_closed(n: int, s, r) -> np.ndarray:
    """Closed-form ring kernel for even n >= 2, vectorized over both
    radii.  The (0,0) pair yields log(1.0) = 0; callers exclude it."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    hi = np.maximum(s, r)
    lo = np.minimum(s, r)
    safe = np.where(hi > 0, hi, 1.0)
    out = np.log(safe)
    if n > 2:
        t2 = (lo / safe) ** 2
        acc = np.zeros_like(t2)
        for power, coef in _ring_closed_coeffs(n).items():
            acc += coef * t2 ** (power // 2)
        out = out - acc
    return out


_RING_PANEL_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}


def _ring_panel_rule(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, pi] over dyadic panels
    [pi/2^{k+1}, pi/2^k] refined toward theta = 0, where the integrand
    develops its (integrable, logarithmic) singularity on the diagonal
    s = r.  Returns (theta, weights, sin(theta), sin^2(theta/2))."""
    try:
        return _RING_PANEL_CACHE[order]
    except KeyError:
        pass
    x, w = np.polynomial.legendre.leggauss(order)
    thetas = []
    weights = []
    hi = math.pi
    for _ in range(54):
        lo = hi / 2.0
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        thetas.append(mid + half * x)
        weights.append(half * w)
        hi = lo
    theta = np.concatenate(thetas)
    wts = np.concatenate(weights)
    rule = (theta, wts, np.sin(theta), np.sin(0.5 * theta) ** 2)
    _RING_PANEL_CACHE[order] = rule
    return rule


def ring_kernel_mean(n: int, s: float, r: float, quad_order: int = 64) -> float:
    """Spherical mean of ``log|x - y|`` for ``|x| = s``, ``|y| = r``,
    by numerical angular quadrature (the independent route against the
    closed form used for matrix assembly).

    Evaluates ``c_n * integral_0^pi log sqrt((s-r)^2 + 4 s r sin^2(t/2))
    sin^{n-2} t dt`` on dyadic Gauss-Legendre panels (order
    ``max(12, quad_order // 4)`` each) clustered toward ``t = 0``; the
    stabilized radicand keeps the diagonal ``s = r``, where the plain
    form ``s^2 + r^2 - 2 s r cos t`` cancels catastrophically, accurate
    down to below 1e-12.
    """
    if n < 2 or n % 2 != 0:
        raise GridMismatch(f"dimension must be even and >= 2, got {n}")
    if quad_order < 32:
        raise GridMismatch("quad_order must be >= 32")
    if s < 0 or r < 0:
        raise GridMismatch("radii must be nonnegative")
    if s == 0.0 and r == 0.0:
        raise GridMismatch("ring kernel undefined at the origin pair")
    _, wts, sin_theta, sin_half_sq = _ring_panel_rule(max(12, quad_order // 4))
    cn = math.gamma(n / 2.0) / (math.sqrt(math.pi) * math.gamma((n - 1) / 2.0))
    vals = 0.5 * np.log((s - r) ** 2 + 4.0 * s * r * sin_half_sq)
    if n > 2:
        vals = vals * sin_theta ** (n - 2)
    return float(cn * (wts @ vals))


# ----------------------------------------------------------------------
# kernel matrix
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Dense ring-kernel data on a grid.

    ``entries[i][j] = Lambda_n(r_i, r_j)`` (exactly symmetric; the
    singular ``(0,0)`` pair is stored as 0 — its quadrature weight is 0
    so it never contributes).  ``apply_table`` holds the hat-basis
    integrals of the kernel used by :func:`potential_apply`; see the
    module docstring for why application does not contract ``entries``
    directly.
    """

    grid: RadialGrid
    quad_order: int
    entries: np.ndarray
    apply_table: np.ndarray

    def __post_init__(self):
        for name in ("entries", "apply_table"):
            arr = np.asarray(getattr(self, name), dtype=float)
            size = len(self.grid.nodes)
            if arr.shape != (size, size):
                raise GridMismatch(f"{name} shape does not match the grid")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def _point_entries(nodes: np.ndarray, n: int, block: int = 512) -> np.ndarray:
    size = len(nodes)
    g = np.empty((size, size))
    for lo in range(0, size, block):
        hi = min(lo + block, size)
        g[lo:hi] = _ring_closed(n, nodes[lo:hi, None], nodes[None, :])
    g[0, 0] = 0.0
    return np.tril(g) + np.tril(g, -1).T


def _hat_product_table(
    nodes: np.ndarray, n: int, quad_order: int, block: int = 64
) -> np.ndarray:
    """A[i][j] = integral of phi_j(rho) * Lambda_n(r_i, rho) dmu(rho),
    with phi_j the hat basis of the grid and per-interval Gauss-Legendre
    of the given order in rho."""
    om = sphere_area(n)
    size = len(nodes)
    xg, wg = np.polynomial.legendre.leggauss(quad_order)
    a, b = nodes[:-1], nodes[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    rho = mid[:, None] + half[:, None] * xg[None, :]
    meas = om * rho ** (n - 1) * (half[:, None] * wg[None, :])
    down = (b[:, None] - rho) / (b - a)[:, None]
    up = (rho - a[:, None]) / (b - a)[:, None]
    mdown = meas * down
    mup = meas * up
    table = np.zeros((size, size))
    rho_flat = rho.ravel()
    for lo in range(0, size, block):
        hi = min(lo + block, size)
        lam = _ring_closed(n, nodes[lo:hi, None], rho_flat[None, :])
        lam = lam.reshape(hi - lo, size - 1, quad_order)
        table[lo:hi, :-1] += np.einsum("ikq,kq->ik", lam, mdown)
        table[lo:hi, 1:] += np.einsum("ikq,kq->ik", lam, mup)
    return table


def kernel_matrix(
    grid: RadialGrid, quad_order: int = 12, cache_dir: str | None = None
) -> KernelMatrix:
    """Assemble (or load from cache) the kernel data for a grid.

    ``quad_order`` is the per-interval Gauss-Legendre order of the
    hat-basis integrals.  When ``cache_dir`` is given, the matrix pair is
    stored in a flat ``.npy`` keyed by (dimension, node layout,
    quad_order); a cache hit is bit-identical to recomputation.
    """
    if quad_order < 4:
        raise GridMismatch("quad_order must be >= 4")
    cache_path = None
    if cache_dir is not None:
        key = f"{grid.structure_key()[:32]}-q{quad_order}"
        cache_path = os.path.join(cache_dir, f"kernel-{key}.npy")
        if os.path.exists(cache_path):
            stacked = np.load(cache_path)
            return KernelMatrix(
                grid=grid,
                quad_order=quad_order,
                entries=stacked[0],
                apply_table=stacked[1],
            )
    entries = _point_entries(grid.nodes, grid.n)
    table = _hat_product_table(grid.nodes, grid.n, quad_order)
    if cache_path is not None:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = cache_path + f".tmp{os.getpid()}.npy"
        np.save(tmp, np.stack([entries, table]))
        os.replace(tmp, cache_path)
    return KernelMatrix(
        grid=grid, quad_order=quad_order, entries=entries, apply_table=table
    )


def potential_apply(kernel: KernelMatrix, density: RadialField, constants) -> RadialField:
    """Potential of a radial density:
    ``out_i = -(1/gamma_m) * integral Lambda_n(r_i, rho) density(rho) dmu``.

    The integral is the kernel's hat-basis table contracted with the node
    values, i.e. the exact potential of the density's piecewise-linear
    interpolant up to the per-interval Gauss-Legendre error.  The caller
    is responsible for the density's discrete mass: a nonzero mass ``mu``
    produces a ``-(mu/gamma_m) log r`` tail, which is faithfully
    reproduced, not corrected.
    """
    if constants.n != kernel.grid.n:
        raise GridMismatch(
            f"constants are for dimension {constants.n}, kernel for {kernel.grid.n}"
        )
    kernel.grid.ensure_same(density.grid)
    values = -(kernel.apply_table @ density.values) / constants.gamma_m
    return RadialField(grid=density.grid, values=values)
