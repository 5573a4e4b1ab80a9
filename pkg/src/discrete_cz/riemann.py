"""Periodic Riemann boundary problem on [-pi, pi].

Grid functions are sampled at t_j = -pi + 2 pi j / n.  Fourier coefficients
follow the convention u_hat(t) = sum_k c_k e^{-i k t}, so the "plus" part of a
function keeps k >= 0 (the transform of a sequence supported on
Z_+ = {0, 1, 2, ...}) and the "minus" part keeps k <= -1.  The Nyquist mode
k = -n/2 counts as minus.

Problem: find Phi_plus, Phi_minus with Phi_plus = G Phi_minus + g.  It is
uniquely solvable when the index of G is zero; other indices are reported
with the kernel / cokernel dimension |kappa| and refused.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INDEX_TOL = 0.05
VANISH_TOL = 1e-12
MAX_DYNAMIC_RANGE = 1e12


class WindingError(ArithmeticError):
    """The winding number could not be resolved on the given samples."""


class IndexObstruction(Exception):
    """Nonzero index: the problem is not uniquely solvable.

    For kappa > 0 the homogeneous problem has kappa independent solutions;
    for kappa < 0 the right-hand side must satisfy |kappa| conditions.
    """

    def __init__(self, kappa: int, where: str = ""):
        self.kappa = int(kappa)
        self.where = where
        kind = "kernel" if kappa > 0 else "cokernel"
        loc = f" ({where})" if where else ""
        super().__init__(
            f"index kappa={self.kappa}{loc}: not uniquely solvable, "
            f"{kind} dimension {abs(self.kappa)}"
        )


@dataclass(frozen=True)
class PeriodicGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        n = len(v)
        if n < 8 or n & (n - 1):
            raise ValueError(f"sample count must be a power of two >= 8, got {n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def t(self) -> np.ndarray:
        return grid_points(self.n)

    @classmethod
    def from_function(cls, f, n: int) -> "PeriodicGrid":
        return cls(f(grid_points(n)))

    @classmethod
    def from_coefficients(cls, coef: np.ndarray) -> "PeriodicGrid":
        """Inverse of :meth:`coefficients`: coef in numpy FFT order (k = 0, 1, ..., -1)."""
        coef = np.asarray(coef, dtype=complex)
        sign = _alternating(len(coef))
        return cls(np.fft.fft(sign * coef))

    def coefficients(self) -> np.ndarray:
        """c_k in numpy FFT order, with values(t_j) = sum_k c_k e^{-i k t_j}."""
        return _alternating(self.n) * np.fft.ifft(self.values)

    def __mul__(self, other):
        o = other.values if isinstance(other, PeriodicGrid) else other
        return PeriodicGrid(self.values * o)

    __rmul__ = __mul__

    def __add__(self, other):
        o = other.values if isinstance(other, PeriodicGrid) else other
        return PeriodicGrid(self.values + o)

    def __sub__(self, other):
        o = other.values if isinstance(other, PeriodicGrid) else other
        return PeriodicGrid(self.values - o)

    def __truediv__(self, other):
        o = other.values if isinstance(other, PeriodicGrid) else other
        return PeriodicGrid(self.values / o)


def grid_points(n: int) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(n) / n


def _alternating(n: int) -> np.ndarray:
    # e^{i k t_0} = (-1)^k for t_0 = -pi; n even keeps the parity of k mod n
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def _plus_mask(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, 1.0 / n)
    return k >= 0


def project_plus_coeff(u_hat: PeriodicGrid) -> PeriodicGrid:
    """Keep the Fourier coefficients with k >= 0."""
    c = u_hat.coefficients()
    return PeriodicGrid.from_coefficients(np.where(_plus_mask(u_hat.n), c, 0.0))


def project_minus(u_hat: PeriodicGrid) -> PeriodicGrid:
    return u_hat - project_plus_coeff(u_hat)


def cotangent_pv(u_hat: PeriodicGrid) -> np.ndarray:
    """(1 / 2 pi i) PV int_{-pi}^{pi} u(t) cot((xi - t)/2) dt at every grid node xi.

    Alternating-point rule: at node i only nodes with j - i odd contribute,
    with weight 2/n.  The rule is exact for trigonometric polynomials of
    degree below n/2.
    """
    n = u_hat.n
    d = np.arange(n)
    w = np.zeros(n)
    odd = d % 2 == 1
    w[odd] = (2.0 / n) / np.tan(np.pi * d[odd] / n)
    # w is indexed by i - j (mod n); apply the circulant by FFT
    conv = np.fft.ifft(np.fft.fft(w) * np.fft.fft(u_hat.values))
    return conv / 1j


def project_plus_cot(u_hat: PeriodicGrid) -> PeriodicGrid:
    """u/2 + (1/4 pi) int u dt + (1/4 pi i) PV int u(t) cot((xi - t)/2) dt.

    The mean term is the trapezoid rule (exact on the grid); the principal
    value uses :func:`cotangent_pv`.
    """
    mean = np.mean(u_hat.values)
    return PeriodicGrid(0.5 * u_hat.values + 0.5 * mean + 0.5 * cotangent_pv(u_hat))


def project_minus_cot(u_hat: PeriodicGrid) -> PeriodicGrid:
    mean = np.mean(u_hat.values)
    return PeriodicGrid(0.5 * u_hat.values - 0.5 * mean - 0.5 * cotangent_pv(u_hat))


def unwrapped_phase(values: np.ndarray, closed: bool = True) -> np.ndarray:
    """Phase of the sample sequence with jumps larger than pi removed.

    With ``closed=True`` the first sample is appended, so the trace ends where
    the closed curve returns to its start.
    """
    v = np.asarray(values, dtype=complex)
    if closed:
        v = np.append(v, v[0])
    return np.unwrap(np.angle(v))


def winding_from_phase(phase: np.ndarray) -> int:
    turns = (phase[-1] - phase[0]) / (2 * np.pi)
    nearest = round(turns)
    if abs(turns - nearest) >= INDEX_TOL:
        raise WindingError(f"winding unresolved: {turns:.4f} turns is not near an integer")
    return int(nearest)


def compute_index(G: PeriodicGrid | np.ndarray) -> int:
    """(1/2 pi) times the total change of arg G over one period, increasing t."""
    vals = G.values if isinstance(G, PeriodicGrid) else np.asarray(G, dtype=complex)
    if np.min(np.abs(vals)) < VANISH_TOL:
        raise WindingError("winding unresolved: coefficient vanishes on the grid")
    phase = unwrapped_phase(vals)
    if np.max(np.abs(np.diff(phase))) > np.pi / 2:
        raise WindingError("winding unresolved: phase steps too large for the grid")
    return winding_from_phase(phase)


@dataclass(frozen=True)
class Factorization:
    X_plus: PeriodicGrid
    X_minus: PeriodicGrid
    kappa: int

    def product_error(self, G: PeriodicGrid) -> float:
        """Relative max-norm defect of X_plus * X_minus against G."""
        return float(np.max(np.abs(self.X_plus.values * self.X_minus.values - G.values))
                     / np.max(np.abs(G.values)))

    def analyticity_defect(self) -> tuple[float, float]:
        """Largest wrong-side coefficient of log X_plus (k<0) and log X_minus (k>0)."""
        lp = _continuous_log(self.X_plus.values).coefficients()
        lm = _continuous_log(self.X_minus.values).coefficients()
        k = np.fft.fftfreq(len(lp), 1.0 / len(lp))
        return float(np.max(np.abs(lp[k < 0]), initial=0.0)), float(np.max(np.abs(lm[k > 0]), initial=0.0))


def _continuous_log(values: np.ndarray) -> PeriodicGrid:
    phase = unwrapped_phase(values, closed=False)
    return PeriodicGrid(np.log(np.abs(values)) + 1j * phase)


def factorize(G: PeriodicGrid) -> Factorization:
    """G = X_plus * X_minus for an index-zero coefficient.

    log G is taken on a continuous branch; its k >= 0 part (constant
    included) goes to X_plus, the k <= -1 part to X_minus.
    """
    kappa = compute_index(G)
    if kappa != 0:
        raise IndexObstruction(kappa, "factorization needs index 0")
    mags = np.abs(G.values)
    if mags.max() / mags.min() > MAX_DYNAMIC_RANGE:
        raise ArithmeticError("log branch unreliable: |G| dynamic range exceeds 1e12")
    L = _continuous_log(G.values)
    return Factorization(
        X_plus=PeriodicGrid(np.exp(project_plus_coeff(L).values)),
        X_minus=PeriodicGrid(np.exp(project_minus(L).values)),
        kappa=0,
    )


@dataclass(frozen=True)
class RiemannProblem:
    G: PeriodicGrid
    g: PeriodicGrid

    def __post_init__(self):
        if self.G.n != self.g.n:
            raise ValueError("G and g must be sampled on the same grid")
        if np.min(np.abs(self.G.values)) <= 0:
            raise ValueError("the coefficient G must not vanish")

    @property
    def kappa(self) -> int:
        return compute_index(self.G)


@dataclass(frozen=True)
class RiemannSolution:
    Phi_plus: PeriodicGrid
    Phi_minus: PeriodicGrid
    residual: float
    factorization: Factorization


def solve_riemann(p: RiemannProblem) -> RiemannSolution:
    """Solve Phi_plus = G Phi_minus + g for index zero.

    With G = X_plus X_minus:  Phi_plus / X_plus - X_minus Phi_minus = g / X_plus,
    where the left terms are plus and minus functions, so
    Phi_plus = X_plus P+(g / X_plus) and Phi_minus = -P-(g / X_plus) / X_minus.
    """
    kappa = p.kappa
    if kappa != 0:
        raise IndexObstruction(kappa)
    fac = factorize(p.G)
    q = p.g / fac.X_plus
    phi_plus = fac.X_plus * project_plus_coeff(q)
    phi_minus = PeriodicGrid(-project_minus(q).values / fac.X_minus.values)
    residual = float(np.max(np.abs(phi_plus.values - p.G.values * phi_minus.values - p.g.values)))
    return RiemannSolution(phi_plus, phi_minus, residual, fac)
