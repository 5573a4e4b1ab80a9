"""Winding numbers of symbol slices and agreement of discrete/continuous indices.

A slice fixes the lateral frequency xi' = (xi_1, ..., xi_{m-1}) and lets xi_m
increase.  The discrete slice runs over [-pi/h, pi/h] and closes by
periodicity; the continuous slice runs over the real line, compactified by
xi_m = tan(s), and closes at infinity only when the symbol takes the same
value at both poles (0, ..., 0, -1) and (0, ..., 0, +1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .kernel import KernelSpec
from .riemann import WindingError, compute_index, unwrapped_phase, winding_from_phase
from .symbol import PartialSumPlan, continuous_symbol, discrete_slice, shell_sums

TRANSMISSION_TOL = 1e-8
VANISH_TOL = 1e-12


class SymbolVanishes(ArithmeticError):
    """a + sigma has a zero on the slice (ellipticity failure)."""


class TransmissionError(ValueError):
    """The continuous slice does not close at infinity."""


@dataclass(frozen=True)
class TransmissionReport:
    sigma_south: complex
    sigma_north: complex
    defect: float
    passed: bool


@dataclass
class SliceWindingReport:
    xi_prime: tuple[float, ...]
    mode: str
    h: float | None
    xi_m: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    phase_trace: np.ndarray = field(repr=False)
    winding: int
    closure_gap: float
    min_modulus: float


def _poles(m: int) -> tuple[np.ndarray, np.ndarray]:
    south = np.zeros(m)
    north = np.zeros(m)
    south[-1], north[-1] = -1.0, 1.0
    return south, north


def transmission_check(k: KernelSpec, a: complex = 0.0) -> TransmissionReport:
    south, north = _poles(k.m)
    s = continuous_symbol(k, a, south)
    n = continuous_symbol(k, a, north)
    defect = abs(s - n)
    return TransmissionReport(s, n, defect, defect <= TRANSMISSION_TOL)


def _as_prime(k: KernelSpec, xi_prime) -> np.ndarray:
    xp = np.atleast_1d(np.asarray(xi_prime, dtype=float)).ravel()
    if len(xp) != k.m - 1:
        raise ValueError(f"xi_prime needs {k.m - 1} components")
    return xp


def _winding(values: np.ndarray, scale: float) -> tuple[np.ndarray, int, float]:
    mod = np.abs(values)
    if mod.min() <= VANISH_TOL * max(1.0, scale):
        raise SymbolVanishes(f"symbol vanishes on slice (min |a + sigma| = {mod.min():.3g})")
    phase = unwrapped_phase(values, closed=False)
    if len(phase) > 1 and np.max(np.abs(np.diff(phase))) > np.pi / 2:
        raise WindingError("winding unresolved: phase steps too large, raise the resolution")
    return phase, winding_from_phase(phase), float(mod.min())


def continuous_winding(
    k: KernelSpec,
    a: complex,
    xi_prime,
    resolution: int = 2048,
) -> SliceWindingReport:
    xp = _as_prime(k, xi_prime)
    if k.m > 1 and not np.any(xp):
        raise ValueError("continuous slices need xi' != 0")
    trans = transmission_check(k, a)
    if not trans.passed:
        raise TransmissionError(
            f"transmission defect {trans.defect:.6g}: the slice does not close at infinity"
        )
    s = -np.pi / 2 + np.pi * (np.arange(resolution) + 0.5) / resolution
    xi_m = np.tan(s)
    pts = np.concatenate([np.broadcast_to(xp, (resolution, k.m - 1)), xi_m[:, None]], axis=1)
    inner = continuous_symbol(k, a, pts)
    values = np.concatenate([[trans.sigma_south], inner, [trans.sigma_north]])
    phase, wind, mmin = _winding(values, abs(complex(a)) + abs(k.constant))
    return SliceWindingReport(
        xi_prime=tuple(xp),
        mode="continuous",
        h=None,
        xi_m=np.concatenate([[-np.inf], xi_m, [np.inf]]),
        values=values,
        phase_trace=phase,
        winding=wind,
        closure_gap=trans.defect,
        min_modulus=mmin,
    )


def discrete_winding(
    k: KernelSpec,
    a: complex,
    h: float,
    xi_prime,
    resolution: int = 512,
    plan: PartialSumPlan | None = None,
) -> SliceWindingReport:
    plan = plan or PartialSumPlan((16.0, 32.0))
    xp = _as_prime(k, xi_prime)
    xi_m, values, _ = discrete_slice(k, a, h, xp, resolution, plan)
    phase, wind, mmin = _winding(values, abs(complex(a)) + abs(k.constant))
    # endpoints recomputed by direct cube sums, independently of the FFT fold
    n = plan.index_radii(h)[-1]
    ends = [np.concatenate([xp, [sgn * np.pi / h]]) for sgn in (-1.0, 1.0)]
    lo, hi = (np.sum(shell_sums(k, h, e, n)) for e in ends)
    return SliceWindingReport(
        xi_prime=tuple(xp),
        mode=f"discrete(h={h:g})",
        h=float(h),
        xi_m=xi_m,
        values=values,
        phase_trace=phase,
        winding=wind,
        closure_gap=float(abs(hi - lo)),
        min_modulus=mmin,
    )


@dataclass(frozen=True)
class PairedCoefficient:
    sigma_M1: np.ndarray
    sigma_M2: np.ndarray
    G: np.ndarray

    def index(self) -> int:
        return compute_index(self.G)


def paired_coefficient(sigma1, sigma2) -> PairedCoefficient:
    """G = sigma_M1 / sigma_M2 pointwise along a periodic slice."""
    s1 = np.asarray(sigma1, dtype=complex)
    s2 = np.asarray(sigma2, dtype=complex)
    if s1.shape != s2.shape:
        raise ValueError("slices must have the same sampling")
    if np.min(np.abs(s2)) < VANISH_TOL:
        raise SymbolVanishes("sigma_M2 vanishes on the slice")
    return PairedCoefficient(s1, s2, s1 / s2)


@dataclass
class AgreementCell:
    xi_prime: tuple[float, ...]
    h: float
    winding_h: int | None
    winding_cont: int | None
    error: str | None = None

    @property
    def equal(self) -> bool:
        return self.error is None and self.winding_h == self.winding_cont


@dataclass
class AgreementReport:
    transmission: TransmissionReport
    cells: list[AgreementCell]

    @property
    def verdict(self) -> str:
        if not self.transmission.passed:
            return "transmission failed"
        if self.cells and all(c.equal for c in self.cells):
            return "agrees"
        return "disagrees"

    def csv_rows(self) -> list[list]:
        rows = []
        for c in self.cells:
            xp = ";".join(f"{v:.17g}" for v in c.xi_prime)
            rows.append([xp, f"{c.h:.17g}", c.winding_h, c.winding_cont, c.equal])
        return rows

    def text(self) -> str:
        t = self.transmission
        lines = [f"transmission: south={t.sigma_south:.6g} north={t.sigma_north:.6g} "
                 f"defect={t.defect:.3g} {'pass' if t.passed else 'FAIL'}"]
        for c in self.cells:
            note = f"  [{c.error}]" if c.error else ""
            lines.append(f"xi'={c.xi_prime} h={c.h:g} discrete={c.winding_h} "
                         f"continuous={c.winding_cont} {'equal' if c.equal else 'UNEQUAL'}{note}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def main_theorem_report(
    k: KernelSpec,
    a: complex,
    h_schedule: Sequence[float],
    xi_prime_set: Iterable,
    resolution: int = 512,
    plan: PartialSumPlan | None = None,
    continuous_resolution: int = 2048,
) -> AgreementReport:
    """Discrete winding for every (xi', h) against the continuous winding at xi'.

    Slice errors are recorded in their cell rather than aborting the table.
    """
    trans = transmission_check(k, a)
    if not trans.passed:
        return AgreementReport(trans, [])
    cells = []
    for xp in xi_prime_set:
        xp = tuple(np.atleast_1d(np.asarray(xp, dtype=float)).tolist())
        try:
            wc = continuous_winding(k, a, xp, continuous_resolution).winding
            cont_err = None
        except (WindingError, SymbolVanishes, ValueError) as exc:
            wc, cont_err = None, f"continuous: {exc}"
        for h in h_schedule:
            try:
                wd = discrete_winding(k, a, h, xp, resolution, plan).winding
                err = cont_err
            except (WindingError, SymbolVanishes, ValueError) as exc:
                wd, err = None, f"discrete: {exc}"
            cells.append(AgreementCell(xp, float(h), wd, wc, err))
    return AgreementReport(trans, cells)
