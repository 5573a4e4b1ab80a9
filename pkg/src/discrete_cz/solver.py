"""Half-space equation on the lattice:

    a u(x) + sum_{y in hZ^m_+} K(x - y) u(y) h^m = v(x),   x in hZ^m_+.

The infinite lattice is modelled by a box: the lateral axes form a torus of
2L nodes each (the kernel is periodized over lateral images), and the depth
axis x_m = h, 2h, ..., D h is truncated.  The right-hand side lives on the
box; ``depth_pad`` extra layers with zero data extend the computational
depth, which reduces the truncation error near the box.

Three routes solve the same data:

* ``solve_dense``       -- assembled matrix, direct elimination (oracle);
* ``solve_truncated``   -- GMRES with FFT-based operator application;
* ``solve_wiener_hopf`` -- lateral FFT, then per lateral frequency a 1D
  half-line problem solved through the periodic Riemann problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse.linalg as spla

from .kernel import KernelSpec, eval_kernel
from .riemann import IndexObstruction, PeriodicGrid, RiemannProblem, WindingError, compute_index, solve_riemann
from .symbol import PartialSumPlan, sample_symbol_grid

DENSE_LIMIT = 5000
TAIL_TOL = 1e-12
_DEFAULT_IMAGES = {1: 0, 2: 1024, 3: 32}


class EllipticityError(ArithmeticError):
    """a + sigma_h vanishes (numerically) on the sampled symbol grid."""


class SingularProblem(np.linalg.LinAlgError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"matrix is numerically singular (condition estimate {condition:.3g})")


class SolvabilityObstruction(IndexObstruction):
    """Some lateral slices have nonzero index; carries (xi', kappa) per slice."""

    def __init__(self, failures: list[tuple[tuple[float, ...], int]]):
        self.failures = failures
        kappa = failures[0][1]
        super().__init__(kappa, f"{len(failures)} slice(s) with nonzero index")
        detail = ", ".join(f"xi'={xp} kappa={kp}" for xp, kp in failures[:8])
        self.args = (f"{self.args[0]}: {detail}",)


def _next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


@dataclass
class HalfSpaceProblem:
    m: int
    h: float
    a: complex
    kernel: KernelSpec
    rhs: np.ndarray
    depth_pad: int = 0
    lateral_images: int | None = None

    def __post_init__(self):
        self.rhs = np.asarray(self.rhs, dtype=complex)
        if self.kernel.m != self.m:
            raise ValueError("kernel dimension does not match the problem")
        if self.rhs.ndim != self.m:
            raise ValueError(f"rhs must be an {self.m}-dimensional grid")
        if not np.all(np.isfinite(self.rhs)):
            raise ValueError("rhs must be finite")
        lat = self.rhs.shape[:-1]
        if any(s != lat[0] for s in lat) or (lat and (lat[0] % 2 or lat[0] < 4)):
            raise ValueError("lateral axes need the same even node count 2L >= 4")
        if self.rhs.shape[-1] < 2:
            raise ValueError("depth D must be >= 2")
        if self.h <= 0 or self.depth_pad < 0:
            raise ValueError("h must be positive and depth_pad non-negative")
        self.a = complex(self.a)

    @property
    def L(self) -> int:
        return self.rhs.shape[0] // 2 if self.m > 1 else 0

    @property
    def D(self) -> int:
        return self.rhs.shape[-1]

    @property
    def depth(self) -> int:
        """Computational depth D + depth_pad."""
        return self.D + self.depth_pad

    @property
    def shape(self) -> tuple[int, ...]:
        return self.rhs.shape[:-1] + (self.depth,)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def padded_rhs(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        out[..., : self.D] = self.rhs
        return out

    @property
    def kernel_depth(self) -> int:
        """Depth range M of kernel coefficients used by the half-line slices."""
        return max(2 * self.depth, 64)

    @cached_property
    def periodized_kernel(self) -> np.ndarray:
        """K(x) h^m summed over lateral images, for depth offsets -M..M.

        Shape (2L,)*(m-1) + (2M+1,); lateral index i is the offset i mod 2L,
        depth index d + M.
        """
        return periodized_kernel(self.kernel, self.h, self.L, self.kernel_depth, self.lateral_images)

    @cached_property
    def _kernel_fft(self) -> np.ndarray:
        M = self.kernel_depth
        Dc = self.depth
        P = _next_pow2(2 * Dc)
        kp = self.periodized_kernel
        arr = np.zeros(kp.shape[:-1] + (P,), dtype=complex)
        d = np.arange(-(Dc - 1), Dc)
        arr[..., d % P] = kp[..., d + M]
        return np.fft.fftn(arr, axes=tuple(range(self.m)))


def periodized_kernel(
    k: KernelSpec, h: float, L: int, M: int, images: int | None = None
) -> np.ndarray:
    m = k.m
    d = np.arange(-M, M + 1)
    if m == 1:
        return eval_kernel(k, h * d[:, None]) * h
    J = _DEFAULT_IMAGES.get(m, 8) if images is None else images
    n_lat = 2 * L
    offs = np.arange(-L, L)
    lat_axes = np.meshgrid(*([offs] * (m - 1)), indexing="ij")
    lat = np.stack(lat_axes, axis=-1).reshape(-1, m - 1)
    out = np.zeros((len(lat), len(d)), dtype=complex)
    js = np.arange(-J, J + 1)
    img = np.stack(np.meshgrid(*([js] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
    step = max(1, (1 << 20) // (len(lat) * len(d)))
    for s in range(0, len(img), step):
        shift = img[s:s + step] * n_lat
        pos = lat[:, None, None, :] + shift[None, None, :, :]
        pts = np.concatenate(
            [np.broadcast_to(pos, (len(lat), len(d), len(shift), m - 1)),
             np.broadcast_to(d[None, :, None, None], (len(lat), len(d), len(shift), 1))],
            axis=-1,
        )
        out += np.sum(eval_kernel(k, h * pts), axis=2) * h**m
    if m == 2 and J > 0:
        # far images: K ~ K(+-e_1)/r^2, summed by the midpoint integral rule
        kp = eval_kernel(k, np.array([h, 0.0])) * h**2
        km = eval_kernel(k, np.array([-h, 0.0])) * h**2
        o = lat[:, 0].astype(float)
        far = n_lat * (J + 0.5)
        tail = kp / (n_lat * (o + far)) + km / (n_lat * (far - o))
        out += tail[:, None]
    out = out.reshape((n_lat,) * (m - 1) + (len(d),))
    # reorder lateral axes so index i holds offset i mod 2L
    for ax in range(m - 1):
        out = np.roll(out, -L, axis=ax)
    return out


def apply_operator(p: HalfSpaceProblem, u: np.ndarray) -> np.ndarray:
    """a u + h^m sum_y K(x - y) u(y) on the computational box.

    Leading batch axes are allowed.  Depth uses zero-padded FFT convolution,
    lateral axes are periodic.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape[-p.m:] != p.shape:
        raise ValueError(f"grid shape {u.shape[-p.m:]} does not match box {p.shape}")
    if p.kernel.is_zero:
        return p.a * u
    kf = p._kernel_fft
    P = kf.shape[-1]
    axes = tuple(range(u.ndim - p.m, u.ndim))
    uf = np.fft.fftn(u, s=p.shape[:-1] + (P,), axes=axes)
    conv = np.fft.ifftn(uf * kf, axes=axes)[..., : p.depth]
    return p.a * u + conv


@dataclass
class SolveReport:
    solution: np.ndarray
    residual_max: float
    iterations: int
    method: str
    converged: bool = True
    residual_norm: float = 0.0
    internal_residual: float | None = None
    slice_failures: list[tuple[tuple[float, ...], int]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "residual_max": self.residual_max,
            "residual_norm": self.residual_norm,
            "internal_residual": self.internal_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "slice_failures": [{"xi_prime": list(x), "kappa": k} for x, k in self.slice_failures],
            "notes": self.notes,
        }


def _residuals(p: HalfSpaceProblem, u: np.ndarray) -> tuple[float, float]:
    r = apply_operator(p, u) - p.padded_rhs
    return float(np.max(np.abs(r))), float(np.linalg.norm(r))


def assemble_matrix(p: HalfSpaceProblem) -> np.ndarray:
    n = p.size
    A = np.empty((n, n), dtype=complex)
    block = 256
    for s in range(0, n, block):
        cols = np.arange(s, min(n, s + block))
        e = np.zeros((len(cols), n), dtype=complex)
        e[np.arange(len(cols)), cols] = 1.0
        A[:, cols] = apply_operator(p, e.reshape((len(cols),) + p.shape)).reshape(len(cols), n).T
    return A


def solve_dense(p: HalfSpaceProblem) -> SolveReport:
    if p.size > DENSE_LIMIT:
        raise ValueError(f"dense solve limited to {DENSE_LIMIT} unknowns, box has {p.size}")
    A = assemble_matrix(p)
    cond = np.linalg.cond(A, 1) if np.any(A) else np.inf
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularProblem(cond)
    u = np.linalg.solve(A, p.padded_rhs.ravel()).reshape(p.shape)
    rmax, rnorm = _residuals(p, u)
    return SolveReport(u, rmax, 1, "dense", residual_norm=rnorm, notes=[f"condition(1-norm)={cond:.6g}"])


def ellipticity_margin(p: HalfSpaceProblem, resolution: int = 32, plan: PartialSumPlan | None = None) -> float:
    """min |a + sigma_h| over a symbol grid."""
    plan = plan or PartialSumPlan((8.0 * p.h * resolution / 2, 16.0 * p.h * resolution / 2))
    grid = sample_symbol_grid(p.kernel, p.a, p.h, resolution, plan)
    return float(np.min(np.abs(grid.values)))


def solve_truncated(
    p: HalfSpaceProblem, tol: float = 1e-10, maxiter: int = 500, restart: int = 60
) -> SolveReport:
    scale = abs(p.a) + abs(p.kernel.constant)
    margin = ellipticity_margin(p) if p.m <= 2 else abs(p.a)
    if margin < 1e-8 * max(scale, 1.0):
        raise EllipticityError(f"a + sigma_h nearly vanishes (min modulus {margin:.3g})")
    n = p.size
    op = spla.LinearOperator(
        (n, n), matvec=lambda x: apply_operator(p, x.reshape(p.shape)).ravel(), dtype=complex
    )
    b = p.padded_rhs.ravel()
    history: list[float] = []
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0:
        u = np.zeros(p.shape, dtype=complex)
        return SolveReport(u, 0.0, 0, "iterative", internal_residual=0.0)
    x, info = spla.gmres(
        op, b, rtol=tol, atol=0.0, restart=restart, maxiter=maxiter,
        callback=history.append, callback_type="pr_norm",
    )
    u = x.reshape(p.shape)
    rmax, rnorm = _residuals(p, u)
    internal = history[-1] * bnorm if history else None
    notes = [] if info == 0 else [f"gmres stopped without reaching tol (info={info})"]
    return SolveReport(
        u, rmax, len(history), "iterative", converged=info == 0,
        residual_norm=rnorm, internal_residual=internal, notes=notes,
    )


@dataclass
class SliceSymbol:
    q: tuple[int, ...]
    xi_prime: tuple[float, ...]
    grid: PeriodicGrid
    kernel_tail: float


def lateral_frequencies(p: HalfSpaceProblem) -> list[tuple[tuple[int, ...], tuple[float, ...]]]:
    """Lateral mode indices (FFT order) with their physical frequencies xi'."""
    if p.m == 1:
        return [((), ())]
    n = 2 * p.L
    freq = np.fft.fftfreq(n, 1.0 / n).astype(int)
    out = []
    for q in np.ndindex(*((n,) * (p.m - 1))):
        signed = tuple(int(freq[i]) for i in q)
        out.append((q, tuple(2 * np.pi * s / (n * p.h) for s in signed)))
    return out


def slice_grid_size(p: HalfSpaceProblem) -> int:
    return max(256, _next_pow2(4 * max(p.kernel_depth, p.depth)))


def slice_symbols(p: HalfSpaceProblem) -> list[SliceSymbol]:
    """a + sigma(xi', t) on the periodic grid for every lateral mode of the torus.

    Depth coefficients with modulus below 1e-12 are dropped.
    """
    M = p.kernel_depth
    n = slice_grid_size(p)
    lat_axes = tuple(range(p.m - 1))
    kq = np.fft.fftn(p.periodized_kernel, axes=lat_axes) if lat_axes else p.periodized_kernel
    d = np.arange(-M, M + 1)
    out = []
    for q, xp in lateral_frequencies(p):
        coef_d = kq[q] if q else kq
        coef_d = np.where(np.abs(coef_d) < TAIL_TOL, 0.0, coef_d)
        coef = np.zeros(n, dtype=complex)
        coef[d % n] = coef_d
        coef[0] += p.a
        tail = float(max(abs(coef_d[0]), abs(coef_d[-1])))
        out.append(SliceSymbol(q, xp, PeriodicGrid.from_coefficients(coef), tail))
    return out


@dataclass
class SliceCheck:
    xi_prime: tuple[float, ...]
    kappa: int | None
    note: str = ""


def check_slices(p: HalfSpaceProblem, slices: list[SliceSymbol] | None = None) -> list[SliceCheck]:
    """Index of a + sigma on every lateral slice; kappa is None where it is unresolved."""
    out = []
    for s in slices if slices is not None else slice_symbols(p):
        try:
            out.append(SliceCheck(s.xi_prime, compute_index(s.grid)))
        except WindingError as exc:
            out.append(SliceCheck(s.xi_prime, None, str(exc)))
    return out


def solvability_gate(p: HalfSpaceProblem, slices: list[SliceSymbol] | None = None) -> list[SliceCheck]:
    """Raise unless every slice is elliptic with index 0.

    Nonzero indices raise :class:`SolvabilityObstruction` (unresolved slices
    are listed in its message); otherwise unresolved slices raise
    :class:`EllipticityError`.
    """
    checks = check_slices(p, slices)
    bad = [(c.xi_prime, c.kappa) for c in checks if c.kappa not in (0, None)]
    unresolved = [c for c in checks if c.kappa is None]
    if bad:
        exc = SolvabilityObstruction(bad)
        if unresolved:
            exc.args = (exc.args[0] + f"; {len(unresolved)} slice(s) not elliptic",)
        exc.unresolved = [c.xi_prime for c in unresolved]
        raise exc
    if unresolved:
        where = ", ".join(f"xi'={c.xi_prime}" for c in unresolved[:8])
        raise EllipticityError(f"a + sigma_h is not elliptic on slice(s) {where}")
    return checks


def solve_wiener_hopf(p: HalfSpaceProblem, tol: float = 1e-8) -> SolveReport:
    """Solve each lateral slice as a half-line problem via the Riemann problem.

    With w the (unknown) values of the full-line convolution on depths <= 0,
    (a + sigma) u_hat = v_hat + w_hat, so Phi_plus = u_hat, Phi_minus = w_hat,
    G = 1 / (a + sigma), g = G v_hat.  The index reported per slice is that of
    a + sigma (the negative of the index of G).
    """
    slices = slice_symbols(p)
    n = slices[0].grid.n
    solvability_gate(p, slices)
    lat_axes = tuple(range(p.m - 1))
    vq = np.fft.fftn(p.rhs, axes=lat_axes) if lat_axes else p.rhs
    uq = np.zeros(p.shape, dtype=complex)
    worst_tail = 0.0
    worst_res = 0.0
    for s in slices:
        v_d = vq[s.q] if s.q else vq
        coef = np.zeros(n, dtype=complex)
        coef[: p.D] = v_d
        G = PeriodicGrid(1.0 / s.grid.values)
        g = G * PeriodicGrid.from_coefficients(coef)
        sol = solve_riemann(RiemannProblem(G, g))
        c = sol.Phi_plus.coefficients()
        if s.q:
            uq[s.q] = c[: p.depth]
        else:
            uq[...] = c[: p.depth]
        scale = max(np.max(np.abs(c)), 1e-300)
        worst_tail = max(worst_tail, float(np.max(np.abs(c[n // 4 : n // 2])) / scale))
        worst_res = max(worst_res, sol.residual)
    u = np.fft.ifftn(uq, axes=lat_axes) if lat_axes else uq
    rmax, rnorm = _residuals(p, u)
    notes = [f"slice grid n={n}", f"max Riemann residual {worst_res:.3g}",
             f"solution tail ratio {worst_tail:.3g}"]
    converged = worst_tail <= tol
    if not converged:
        notes.append("half-line solution has not decayed within the slice grid")
    return SolveReport(u, rmax, len(slices), "wiener-hopf", converged=converged,
                       residual_norm=rnorm, notes=notes)
