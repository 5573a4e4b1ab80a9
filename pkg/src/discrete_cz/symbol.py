"""Discrete and continuous symbols of Calderon-Zygmund convolution operators.

The discrete symbol of ``a + h^m sum K(x - y) u(y)`` on the lattice hZ^m is

    sigma_h(xi) = a + lim_N sum_{x in Q_N} e^{-i xi.x} K(x) h^m,

with Q_N the max-norm cube of physical radius N.  Truncation radii in a
:class:`PartialSumPlan` are physical, so radius N at step h covers the same
index set as radius N/h at step 1.

Both symbols use the e^{-i xi.x} sign convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .kernel import KernelSpec, eval_kernel

_CHUNK = 1 << 21


@dataclass(frozen=True)
class PartialSumPlan:
    N_schedule: tuple[float, ...] = (32.0, 64.0)
    extrapolate: bool = False
    tol: float = 1e-3

    def __post_init__(self):
        sched = tuple(float(n) for n in self.N_schedule)
        if len(sched) < 2:
            raise ValueError("N_schedule needs at least two radii")
        if any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] <= 0:
            raise ValueError("N_schedule must be positive and strictly increasing")
        object.__setattr__(self, "N_schedule", sched)

    def index_radii(self, h: float) -> tuple[int, ...]:
        # the epsilon keeps N/h = integer from rounding down
        return tuple(int(math.floor(n / h + 1e-9)) for n in self.N_schedule)


@dataclass(frozen=True)
class SymbolSample:
    xi: tuple[float, ...]
    value: complex
    h: float
    N: float
    flags: tuple[str, ...] = ()
    partial_sums: tuple[complex, ...] = ()

    @property
    def converged(self) -> bool:
        return "nonconverged" not in self.flags


@dataclass
class SymbolGrid:
    h: float
    resolution: int
    axis: np.ndarray
    values: np.ndarray
    constant_a: complex
    N: float
    increment: np.ndarray = field(repr=False)
    tol: float = 1e-3

    @property
    def flags(self) -> np.ndarray:
        """Boolean array, True where the last two partial sums differ by more than tol."""
        return np.abs(self.increment) > self.tol

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.axis] * self.values.ndim), indexing="ij")
        return np.stack(mesh, axis=-1)


def _half_lattice(m: int, n: int) -> Iterator[np.ndarray]:
    """Yield chunks of index points y in Q_n whose first nonzero coordinate is positive."""
    side = 2 * n + 1
    rest = side ** (m - 1)
    rows = max(1, _CHUNK // rest)
    other = None
    if m > 1:
        axes = [np.arange(-n, n + 1)] * (m - 1)
        other = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m - 1)
    for start in range(0, n + 1, rows):
        first = np.arange(start, min(n + 1, start + rows))
        if m == 1:
            pts = first[first > 0][:, None]
        else:
            pts = np.concatenate(
                [np.broadcast_to(first[:, None, None], (len(first), rest, 1)),
                 np.broadcast_to(other[None], (len(first), rest, m - 1))],
                axis=-1,
            ).reshape(-1, m)
            nz = pts != 0
            lead = np.argmax(nz, axis=1)
            keep = nz.any(axis=1) & (pts[np.arange(len(pts)), lead] > 0)
            pts = pts[keep]
        if len(pts):
            yield pts


def _lattice(m: int, n: int) -> Iterator[np.ndarray]:
    """Yield chunks of all index points of Q_n (including 0)."""
    side = 2 * n + 1
    rest = side ** (m - 1)
    rows = max(1, _CHUNK // rest)
    other = None
    if m > 1:
        axes = [np.arange(-n, n + 1)] * (m - 1)
        other = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m - 1)
    for start in range(-n, n + 1, rows):
        first = np.arange(start, min(n + 1, start + rows))
        if m == 1:
            yield first[:, None]
        else:
            yield np.concatenate(
                [np.broadcast_to(first[:, None, None], (len(first), rest, 1)),
                 np.broadcast_to(other[None], (len(first), rest, m - 1))],
                axis=-1,
            ).reshape(-1, m)


def shell_sums(k: KernelSpec, h: float, xi: Sequence[float], n: int) -> np.ndarray:
    """Return s[r] = sum over the max-norm shell |y| = r of e^{-i xi.x} K(x) h^m, x = h y.

    Opposite points are paired before summation.
    """
    xi = np.asarray(xi, dtype=float)
    re = np.zeros(n + 1)
    im = np.zeros(n + 1)
    if k.is_zero or n == 0:
        return re + 1j * im
    for y in _half_lattice(k.m, n):
        x = h * y
        phase = np.exp(-1j * (x @ xi))
        term = (eval_kernel(k, x) * phase + eval_kernel(k, -x) * np.conj(phase)) * h**k.m
        r = np.max(np.abs(y), axis=1)
        re += np.bincount(r, weights=term.real, minlength=n + 1)
        im += np.bincount(r, weights=term.imag, minlength=n + 1)
    return re + 1j * im


def _near_jump(h: float, xi: np.ndarray, n: int) -> bool:
    eta = h * xi
    wrapped = eta - 2 * np.pi * np.round(eta / (2 * np.pi))
    return bool(np.max(np.abs(wrapped)) <= 2 * np.pi / max(n, 1))


def discrete_symbol(
    k: KernelSpec,
    a: complex,
    h: float,
    xi: Sequence[float],
    plan: PartialSumPlan | None = None,
) -> SymbolSample:
    plan = plan or PartialSumPlan()
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (k.m,):
        raise ValueError(f"xi must have {k.m} components")
    if h <= 0:
        raise ValueError("lattice step must be positive")
    if np.any(np.abs(xi) > np.pi / h * (1 + 1e-12)):
        raise ValueError("xi must lie in the basic cube [-pi/h, pi/h]^m")
    radii = plan.index_radii(h)
    shells = shell_sums(k, h, xi, radii[-1])
    partial = np.cumsum(shells)
    sums = [complex(partial[r]) for r in radii]
    value = sums[-1]
    n1, n2 = radii[-2], radii[-1]
    if plan.extrapolate and n2 > n1 > 0:
        value = (n2 * sums[-1] - n1 * sums[-2]) / (n2 - n1)
    flags = []
    if abs(sums[-1] - sums[-2]) > plan.tol:
        flags.append("nonconverged")
        if _near_jump(h, xi, n1):
            flags.append("jump_suspected")
    return SymbolSample(
        xi=tuple(float(v) for v in xi),
        value=complex(a) + value,
        h=float(h),
        N=plan.N_schedule[-1],
        flags=tuple(flags),
        partial_sums=tuple(complex(a) + s for s in sums),
    )


def folded_weights(
    k: KernelSpec,
    h: float,
    r: int,
    n_lo: int,
    n_hi: int,
    fold_axes: Sequence[int],
    fixed_xi: dict[int, float] | None = None,
) -> np.ndarray:
    """Fold lattice terms with n_lo < |y| <= n_hi onto (Z/r)^{len(fold_axes)}.

    Axes not folded are summed against e^{-i xi_a x_a} for the fixed values in
    ``fixed_xi``.  A forward FFT of the result gives the lattice sum at
    h xi = -pi + 2 pi j / r along the folded axes.
    """
    fixed_xi = fixed_xi or {}
    fold_axes = list(fold_axes)
    shape = (r,) * len(fold_axes)
    re = np.zeros(int(np.prod(shape)))
    im = np.zeros_like(re)
    if k.is_zero or n_hi <= n_lo:
        return (re + 1j * im).reshape(shape)
    for y in _lattice(k.m, n_hi):
        rad = np.max(np.abs(y), axis=1)
        sel = (rad > n_lo) & (rad <= n_hi)
        if not sel.any():
            continue
        y = y[sel]
        x = h * y
        w = eval_kernel(k, x) * h**k.m
        for ax, val in fixed_xi.items():
            w = w * np.exp(-1j * val * x[:, ax])
        sign = np.where(np.sum(y[:, fold_axes], axis=1) % 2 == 0, 1.0, -1.0)
        w = w * sign
        idx = np.ravel_multi_index(tuple((y[:, ax] % r) for ax in fold_axes), shape)
        re += np.bincount(idx, weights=w.real, minlength=re.size)
        im += np.bincount(idx, weights=w.imag, minlength=im.size)
    return (re + 1j * im).reshape(shape)


def _close_periodic(arr: np.ndarray) -> np.ndarray:
    """Append the +pi/h endpoint along every axis by periodicity."""
    for ax in range(arr.ndim):
        first = np.take(arr, [0], axis=ax)
        arr = np.concatenate([arr, first], axis=ax)
    return arr


def sample_symbol_grid(
    k: KernelSpec,
    a: complex,
    h: float,
    resolution: int,
    plan: PartialSumPlan | None = None,
) -> SymbolGrid:
    """Discrete symbol on the (resolution+1)^m grid xi = (-pi + 2 pi j/resolution)/h.

    All grid values come from one FFT of the kernel samples on Q_N folded
    modulo the resolution; the endpoint +pi/h is filled in by periodicity.
    """
    plan = plan or PartialSumPlan()
    if resolution < 2 or resolution % 2:
        raise ValueError("resolution must be even and >= 2")
    radii = plan.index_radii(h)
    n1, n2 = radii[-2], radii[-1]
    axes = list(range(k.m))
    inner = np.fft.fftn(folded_weights(k, h, resolution, -1, n1, axes))
    outer = np.fft.fftn(folded_weights(k, h, resolution, n1, n2, axes))
    values = complex(a) + inner + outer
    if plan.extrapolate and n2 > n1 > 0:
        values = complex(a) + inner + outer * n2 / (n2 - n1)
    axis = (-np.pi + 2 * np.pi * np.arange(resolution + 1) / resolution) / h
    return SymbolGrid(
        h=float(h),
        resolution=resolution,
        axis=axis,
        values=_close_periodic(values),
        constant_a=complex(a),
        N=plan.N_schedule[-1],
        increment=_close_periodic(outer),
        tol=plan.tol,
    )


def discrete_slice(
    k: KernelSpec,
    a: complex,
    h: float,
    xi_prime: Sequence[float],
    resolution: int,
    plan: PartialSumPlan | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """sigma_h(xi', xi_m) for xi_m on the closed grid of [-pi/h, pi/h].

    Returns (xi_m, values, increment between the last two partial sums).
    """
    plan = plan or PartialSumPlan()
    xi_prime = np.asarray(xi_prime, dtype=float).ravel()
    if len(xi_prime) != k.m - 1:
        raise ValueError(f"xi_prime must have {k.m - 1} components")
    if np.any(np.abs(xi_prime) > np.pi / h * (1 + 1e-12)):
        raise ValueError("xi_prime must lie in [-pi/h, pi/h]^(m-1)")
    radii = plan.index_radii(h)
    n1, n2 = radii[-2], radii[-1]
    fixed = {ax: float(v) for ax, v in enumerate(xi_prime)}
    last = [k.m - 1]
    inner = np.fft.fft(folded_weights(k, h, resolution, -1, n1, last, fixed))
    outer = np.fft.fft(folded_weights(k, h, resolution, n1, n2, last, fixed))
    if plan.extrapolate and n2 > n1 > 0:
        outer = outer * n2 / (n2 - n1)
    xi_m = (-np.pi + 2 * np.pi * np.arange(resolution + 1) / resolution) / h
    return xi_m, _close_periodic(complex(a) + inner + outer), _close_periodic(outer)


# angular multipliers of the density modes e^{i p theta}, m = 2
def _mode_multiplier(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p)
    q = np.abs(p)
    out = np.zeros(p.shape, dtype=complex)
    even = (q % 2 == 0) & (q > 0)
    odd = q % 2 == 1
    out[even] = 2 * np.pi * (-1.0) ** (q[even] // 2) / q[even]
    out[odd] = -2j * np.pi * (-1.0) ** ((q[odd] - 1) // 2) / q[odd]
    return out


def continuous_symbol(k: KernelSpec, a: complex, xi) -> np.ndarray | complex:
    """a + PV integral of K(x) e^{-i xi.x} dx, for xi != 0 (vectorized over leading axes).

    For a degree -m kernel the radial integral is done in closed form,
    leaving the angular integral of Omega(theta) (-log|xi.theta| - i pi/2 sign(xi.theta));
    for m=2 that integral is exact on each trigonometric mode of Omega.
    """
    pts = np.asarray(xi, dtype=float)
    scalar = pts.ndim == 1 or (k.m == 1 and pts.ndim == 0)
    pts = pts.reshape(-1, k.m) if scalar else pts
    if pts.shape[-1] != k.m:
        raise ValueError(f"xi must have {k.m} components")
    norm = np.sqrt(np.sum(pts * pts, axis=-1))
    if np.any(norm == 0):
        raise ValueError("the continuous symbol is undefined at xi = 0")
    if k.is_zero:
        out = np.zeros(norm.shape, dtype=complex)
    elif k.family == "riesz":
        out = -1j * k.scale * pts[..., k.j - 1] / norm
    elif k.m == 1:
        lo, hi = k.omega
        s = np.sign(pts[..., 0])
        logs = -np.log(np.abs(pts[..., 0]))
        out = k.constant * ((hi + lo) * logs - 0.5j * np.pi * s * (hi - lo))
    else:
        coef = k.trig_coefficients()
        n = len(coef)
        p = np.fft.fftfreq(n, 1.0 / n).astype(int)
        phi = np.arctan2(pts[..., 1], pts[..., 0])
        mult = _mode_multiplier(p)
        out = np.zeros(norm.shape, dtype=complex)
        for pi_, c, mu in zip(p, coef, mult):
            if n % 2 == 0 and pi_ == -(n // 2):
                # Nyquist sample interpolated as cos(n/2 theta)
                out += c * mu * np.cos(n // 2 * phi)
            else:
                out += c * mu * np.exp(1j * pi_ * phi)
        out = k.constant * out
    out = complex(a) + out
    return complex(out[0]) if scalar else out


@dataclass
class Lemma1Report:
    xi: tuple[float, ...]
    h: list[float]
    discrete: list[complex]
    continuous: complex
    errors: list[float]
    monotone: bool
    flags: list[tuple[str, ...]]

    def rows(self):
        return list(zip(self.h, self.discrete, self.errors))


def lemma1_convergence_report(
    k: KernelSpec,
    xi: Sequence[float],
    h_schedule: Sequence[float],
    plan: PartialSumPlan | None = None,
    a: complex = 0.0,
) -> Lemma1Report:
    """|sigma_h(xi) - sigma(xi)| for a decreasing sequence of steps h."""
    hs = [float(h) for h in h_schedule]
    if any(c >= b for b, c in zip(hs, hs[1:])):
        raise ValueError("h_schedule must be strictly decreasing")
    cont = continuous_symbol(k, a, xi)
    samples = [discrete_symbol(k, a, h, xi, plan) for h in hs]
    errors = [abs(s.value - cont) for s in samples]
    if k.is_zero:
        monotone = all(e == 0 for e in errors)
    else:
        monotone = all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    return Lemma1Report(
        xi=tuple(float(v) for v in xi),
        h=hs,
        discrete=[s.value for s in samples],
        continuous=cont,
        errors=errors,
        monotone=monotone,
        flags=[s.flags for s in samples],
    )


def image_gap(k: KernelSpec, grid: SymbolGrid, n_angles: int = 4096) -> float:
    """Largest distance from a discrete symbol value to the continuous image (m=2).

    The continuous image is sampled along the unit circle; zero means the
    discrete values lie in the closure of the continuous image, up to
    sampling of that curve.
    """
    if k.m != 2:
        raise ValueError("image comparison is implemented for m=2")
    phi = 2 * np.pi * np.arange(n_angles) / n_angles
    curve = continuous_symbol(k, grid.constant_a, np.stack([np.cos(phi), np.sin(phi)], axis=-1))
    vals = grid.values.ravel()
    if np.ptp(curve.real) + np.ptp(curve.imag) == 0:
        return float(np.max(np.abs(vals - curve[0])))
    # distance to the polyline through the sampled curve
    p0 = curve
    p1 = np.roll(curve, -1)
    best = np.full(vals.shape, np.inf)
    for start in range(0, len(vals), 256):
        v = vals[start:start + 256, None]
        seg = p1 - p0
        denom = np.where(np.abs(seg) == 0, 1.0, np.abs(seg) ** 2)
        t = np.clip(((v - p0) * np.conj(seg)).real / denom, 0.0, 1.0)
        d = np.abs(v - (p0 + t * seg))
        best[start:start + 256] = d.min(axis=1)
    return float(best.max())
