"""Calderon-Zygmund kernels K(x) = Omega(x/|x|) / |x|^m.

Two families are supported:

* ``riesz`` -- K_j(x) = c_m x_j / |x|^(m+1), with
  c_m = Gamma((m+1)/2) / pi^((m+1)/2), so that the continuous symbol
  (with the e^{-i xi.x} convention) is -i xi_j / |xi|.
* ``custom`` -- a tabulated spherical density.  For m=1 the sphere is the
  pair {-1, +1}; for m=2 the density is given by equispaced angle samples
  theta_k = 2 pi k / n and evaluated by trigonometric interpolation.

Every kernel carries a real ``scale`` multiplying it; ``scale=0`` gives the
zero kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MEAN_TOL = 1e-10


class KernelError(ValueError):
    """Raised for kernel descriptions violating the kernel conditions."""


def riesz_constant(m: int) -> float:
    return math.gamma((m + 1) / 2) / math.pi ** ((m + 1) / 2)


def _trig_coefficients(samples: np.ndarray) -> np.ndarray:
    """Coefficients c_p (p = 0..n-1, numpy order) with Omega(theta_k) = sum c_p e^{i p theta_k}."""
    return np.fft.fft(samples) / len(samples)


@dataclass(frozen=True)
class KernelSpec:
    m: int
    family: str
    j: int | None = None
    omega: tuple[complex, ...] | None = None
    scale: float = 1.0
    _coef: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def constant(self) -> float:
        """Total multiplier in front of Omega(theta)/|x|^m."""
        if self.family == "riesz":
            return riesz_constant(self.m) * self.scale
        return self.scale

    @property
    def is_zero(self) -> bool:
        return self.scale == 0.0

    @property
    def is_complex(self) -> bool:
        """True when the density takes non-real values (allowed, but flagged in reports)."""
        if self.omega is None:
            return False
        return bool(np.any(np.abs(np.imag(np.asarray(self.omega))) > 0))

    def trig_coefficients(self) -> np.ndarray:
        """Fourier coefficients of the m=2 custom density, indexed by p (numpy FFT order)."""
        if self._coef is None:
            raise KernelError("trigonometric coefficients only exist for custom m=2 kernels")
        return self._coef

    def density(self, theta_or_sign: np.ndarray) -> np.ndarray:
        """Omega on S^{m-1}: angle theta for m=2, sign (+-1) for m=1 (custom only)."""
        arg = np.asarray(theta_or_sign, dtype=float)
        if self.family != "custom":
            raise KernelError("density() is only defined for custom kernels")
        if self.m == 1:
            lo, hi = self.omega
            return np.where(arg > 0, hi, lo).astype(complex)
        c = self._coef
        n = len(c)
        out = np.zeros(arg.shape, dtype=complex)
        for p in range(n):
            q = p if p < n // 2 else p - n
            if n % 2 == 0 and p == n // 2:
                out += c[p] * np.cos(n // 2 * arg)
            else:
                out += c[p] * np.exp(1j * q * arg)
        return out

    def spherical_integral(self, n_theta: int | None = None) -> complex:
        """Integral of Omega over S^{m-1} (counting measure for m=1)."""
        if self.family == "riesz":
            return 0.0
        if self.m == 1:
            return complex(sum(self.omega))
        n = n_theta or len(self.omega)
        theta = 2 * np.pi * np.arange(n) / n
        return complex(2 * np.pi * np.mean(self.density(theta)))


def make_kernel(
    family: str,
    m: int,
    j: int | None = None,
    omega=None,
    scale: float = 1.0,
) -> KernelSpec:
    """Build and validate a kernel.

    Raises KernelError for j outside 1..m, unsupported dimensions, non-finite
    samples, or densities whose spherical integral is not zero.
    """
    if int(m) != m or m < 1:
        raise KernelError(f"dimension must be a positive integer, got {m!r}")
    m = int(m)
    if not math.isfinite(scale):
        raise KernelError("scale must be finite")
    if family == "riesz":
        if j is None or not 1 <= int(j) <= m:
            raise KernelError(f"riesz(j) requires 1 <= j <= m={m}, got j={j!r}")
        return KernelSpec(m=m, family="riesz", j=int(j), scale=float(scale))
    if family != "custom":
        raise KernelError(f"unknown kernel family {family!r}")
    if omega is None:
        raise KernelError("custom kernels need a spherical density")
    samples = np.asarray(omega, dtype=complex).ravel()
    if not np.all(np.isfinite(samples)):
        raise KernelError("density samples must be finite")
    if m == 1:
        if len(samples) != 2:
            raise KernelError("m=1 density is the pair (Omega(-1), Omega(+1))")
        coef = None
    elif m == 2:
        if len(samples) < 2:
            raise KernelError("m=2 density needs at least two angle samples")
        coef = _trig_coefficients(samples)
    else:
        raise KernelError("custom densities are supported for m <= 2 only")
    k = KernelSpec(
        m=m,
        family="custom",
        omega=tuple(complex(s) for s in samples),
        scale=float(scale),
        _coef=coef,
    )
    size = max(1.0, float(np.sum(np.abs(samples))) * (2 * np.pi / len(samples) if m == 2 else 1.0))
    checks = [k.spherical_integral()]
    if m == 2:
        checks.append(k.spherical_integral(2 * len(samples)))
    for mean in checks:
        if abs(mean) > MEAN_TOL * size:
            raise KernelError(f"spherical integral of the density is {mean:.6g}, must vanish")
    return k


def riesz(j: int, m: int, scale: float = 1.0) -> KernelSpec:
    return make_kernel("riesz", m, j=j, scale=scale)


def zero_kernel(m: int) -> KernelSpec:
    return make_kernel("riesz", m, j=1, scale=0.0)


def inverse_x(scale: float = 1.0) -> KernelSpec:
    """The m=1 kernel K(x) = 1/x."""
    return make_kernel("custom", 1, omega=(-1.0, 1.0), scale=scale)


def angular_mode(p: int, n_theta: int = 16, scale: float = 1.0) -> KernelSpec:
    """m=2 kernel with density e^{i p theta} (p != 0)."""
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return make_kernel("custom", 2, omega=np.exp(1j * p * theta), scale=scale)


def eval_kernel(k: KernelSpec, x) -> np.ndarray | complex:
    """Evaluate K at one point (shape (m,)) or many points (shape (..., m)).

    K(0) = 0 by convention.
    """
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 1
    if scalar:
        pts = pts[None, :]
    if pts.shape[-1] != k.m:
        raise ValueError(f"expected points with {k.m} coordinates, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("kernel evaluated at a non-finite point")
    r = np.sqrt(np.sum(pts * pts, axis=-1))
    zero = r == 0
    rs = np.where(zero, 1.0, r)
    if k.is_zero:
        out = np.zeros(r.shape, dtype=complex)
    elif k.family == "riesz":
        out = (k.constant * pts[..., k.j - 1] / rs ** (k.m + 1)).astype(complex)
    elif k.m == 1:
        out = k.constant * k.density(pts[..., 0]) / rs
    else:
        theta = np.arctan2(pts[..., 1], pts[..., 0])
        out = k.constant * k.density(theta) / rs**2
    out = np.where(zero, 0.0, out)
    return complex(out[0]) if scalar else out
