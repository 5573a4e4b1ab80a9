"""Command-line front end.

    discrete-cz symbol | index | transmission | verify | riemann | solve [flags]

A ``--config`` file (key = value lines, keys named like the long flags)
supplies defaults; flags given on the command line win.

Exit status: 0 success, 1 input error, 2 solvability obstruction (nonzero index).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import formats
from .kernel import KernelError
from .riemann import IndexObstruction, RiemannProblem, WindingError, solve_riemann
from .solvability import (
    SymbolVanishes, TransmissionError, continuous_winding, discrete_winding,
    main_theorem_report, transmission_check,
)
from .solver import (
    EllipticityError, HalfSpaceProblem, SingularProblem, SolvabilityObstruction,
    solvability_gate, solve_dense, solve_truncated, solve_wiener_hopf,
)
from .svg import curve_svg
from .symbol import PartialSumPlan, discrete_slice, sample_symbol_grid

log = logging.getLogger("discrete_cz")

EXIT_OK, EXIT_INPUT, EXIT_OBSTRUCTION = 0, 1, 2
COMMANDS = ("symbol", "index", "transmission", "verify", "riemann", "solve")

DEFAULTS = {
    "kernel": "riesz:j=1,m=2",
    "h": "1",
    "a": "0",
    "xi-prime": "1",
    "resolution": "256",
    "N": "16,32",
    "tol": "1e-10",
    "out": "out",
    "method": "iterative",
    "depth-pad": "0",
}


class InputError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="discrete-cz", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key = value file with defaults")
    ap.add_argument("--kernel", help="builtin kernel reference or kernel file")
    ap.add_argument("--h", help="lattice step, or comma list of steps (index)")
    ap.add_argument("--a", help="additive constant, e.g. 2 or 1+1i")
    ap.add_argument("--xi-prime", dest="xi_prime", help="lateral frequency; ';' separates several")
    ap.add_argument("--resolution", help="samples per axis / along a slice")
    ap.add_argument("--N", help="comma list of physical truncation radii")
    ap.add_argument("--box", help="box as 2L x D, e.g. 16x8 (solve, overrides the problem file)")
    ap.add_argument("--tol", help="relative residual tolerance (solve)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--G", dest="G", help="coefficient grid CSV (riemann)")
    ap.add_argument("--g", dest="g", help="right-hand side grid CSV (riemann)")
    ap.add_argument("--problem", help="half-space problem file (solve)")
    ap.add_argument("--method", choices=("dense", "iterative", "wiener-hopf"))
    ap.add_argument("--depth-pad", dest="depth_pad", help="extra zero-data depth layers (solve)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


class RunConfig:
    """Flags over config file over defaults."""

    def __init__(self, ns: argparse.Namespace):
        self.command = ns.command
        self.base = Path(".")
        values = dict(DEFAULTS)
        if ns.config:
            path = Path(ns.config)
            if not path.exists():
                raise InputError(f"config file {path} not found")
            values.update(formats.read_kv(path))
            self.base = path.parent
        self.explicit = set()
        for key, val in vars(ns).items():
            if val is not None and key not in ("command", "config", "verbose"):
                values[key.replace("_", "-")] = val
                self.explicit.add(key.replace("_", "-"))
        self.values = values
        if float(values["tol"]) <= 0:
            raise InputError("tolerances must be positive")

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    @property
    def kernel(self):
        return formats.parse_kernel_ref(self.values["kernel"], self.base)

    @property
    def a(self) -> complex:
        return formats.parse_complex(self.values["a"])

    @property
    def hs(self) -> list[float]:
        hs = formats.parse_floats(self.values["h"])
        if not hs or any(h <= 0 for h in hs):
            raise InputError("h schedule must be nonempty and positive")
        return hs

    @property
    def resolution(self) -> int:
        return int(self.values["resolution"])

    @property
    def plan(self) -> PartialSumPlan:
        return PartialSumPlan(tuple(formats.parse_floats(self.values["N"])))

    def xi_primes(self, m: int) -> list[tuple[float, ...]]:
        if m == 1:
            return [()]
        out = []
        for part in str(self.values["xi-prime"]).split(";"):
            vals = [formats._fraction(v) for v in part.split(",") if v.strip()]
            if len(vals) != m - 1:
                raise InputError(f"xi-prime needs {m - 1} components, got {part!r}")
            out.append(tuple(vals))
        if not out:
            raise InputError("xi-prime schedule is empty")
        return out

    @property
    def out(self) -> Path:
        out = Path(self.values["out"])
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InputError(f"output directory {out} is not writable: {exc}") from exc
        return out


def cmd_symbol(cfg: RunConfig) -> int:
    k, a, h, out = cfg.kernel, cfg.a, cfg.hs[0], cfg.out
    if k.m <= 2:
        grid = sample_symbol_grid(k, a, h, cfg.resolution, cfg.plan)
        formats.write_symbol_grid(out / "symbol_grid.csv", grid, k.m)
    if k.m == 1:
        curve = grid.values.ravel()
        title = f"a + sigma_h, h={h:g}"
    else:
        xp = cfg.xi_primes(k.m)[0]
        xi_m, curve, _ = discrete_slice(k, a, h, xp, cfg.resolution, cfg.plan)
        formats.write_csv(out / "symbol_slice.csv", ["xi_m", "re", "im"],
                          ((x, v.real, v.imag) for x, v in zip(xi_m, curve)))
        title = f"a + sigma_h(xi'={xp}, .), h={h:g}"
    (out / "symbol_curve.svg").write_text(curve_svg(curve, title))
    print(f"symbol written to {out}")
    return EXIT_OK


def cmd_index(cfg: RunConfig) -> int:
    k, a, out = cfg.kernel, cfg.a, cfg.out
    trans = transmission_check(k, a)
    if not trans.passed:
        print(f"transmission failed: defect {trans.defect:.17g}; no winding computed")
        formats.write_json(out / "index_report.json", {"transmission_defect": trans.defect, "passed": False})
        return EXIT_INPUT
    xps = cfg.xi_primes(k.m)
    if k.m == 1:
        rep = None
        rows = []
        for h in cfg.hs:
            w = discrete_winding(k, a, h, (), cfg.resolution, cfg.plan)
            rows.append(["", h, w.winding, "", ""])
            _write_trace(out, w, f"h{h:g}")
        nonzero = any(r[2] != 0 for r in rows)
    else:
        rep = main_theorem_report(k, a, cfg.hs, xps, cfg.resolution, cfg.plan)
        rows = rep.csv_rows()
        for xp in xps:
            try:
                _write_trace(out, continuous_winding(k, a, xp), f"cont_xi{_tag(xp)}")
                _write_trace(out, discrete_winding(k, a, cfg.hs[0], xp, cfg.resolution, cfg.plan),
                             f"h{cfg.hs[0]:g}_xi{_tag(xp)}")
            except (WindingError, SymbolVanishes, TransmissionError) as exc:
                log.warning("no trace for xi'=%s: %s", xp, exc)
        (out / "index_report.txt").write_text(rep.text() + "\n")
        print(rep.text())
        nonzero = any((c.winding_h or 0) != 0 or (c.winding_cont or 0) != 0 for c in rep.cells)
        if any(c.error for c in rep.cells) and not nonzero:
            return EXIT_INPUT
    formats.write_csv(out / "agreement.csv", ["xi_prime", "h", "winding_h", "winding_cont", "equal"], rows)
    return EXIT_OBSTRUCTION if nonzero else EXIT_OK


def _tag(xp) -> str:
    return "_".join(f"{v:g}" for v in xp)


def _write_trace(out: Path, w, tag: str) -> None:
    formats.write_csv(out / f"phase_{tag}.csv", ["xi_m", "re", "im", "phase"],
                      ((x, v.real, v.imag, p) for x, v, p in zip(w.xi_m, w.values, w.phase_trace)))
    (out / f"curve_{tag}.svg").write_text(curve_svg(w.values, f"{w.mode} xi'={w.xi_prime}", w.winding))


def cmd_transmission(cfg: RunConfig) -> int:
    t = transmission_check(cfg.kernel, cfg.a)
    payload = {"sigma_south": t.sigma_south, "sigma_north": t.sigma_north,
               "defect": t.defect, "passed": t.passed}
    formats.write_json(cfg.out / "transmission.json", payload)
    print(f"south={t.sigma_south:.17g} north={t.sigma_north:.17g} defect={t.defect:.17g} "
          f"{'pass' if t.passed else 'FAIL'}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_checks

    results = run_checks()
    rows = [[r.name, r.status, r.detail] for r in results]
    formats.write_csv(cfg.out / "verify.csv", ["check", "status", "detail"], rows)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.status:4}  {r.name:<{width}}  {r.detail}")
    return EXIT_OK if all(r.passed is not False for r in results) else EXIT_INPUT


def cmd_riemann(cfg: RunConfig) -> int:
    if not cfg.get("G") or not cfg.get("g"):
        raise InputError("riemann needs --G and --g grid files")
    G = formats.read_periodic_grid(cfg.base / cfg.get("G"))
    g = formats.read_periodic_grid(cfg.base / cfg.get("g"))
    out = cfg.out
    prob = RiemannProblem(G, g)
    try:
        sol = solve_riemann(prob)
    except IndexObstruction as exc:
        formats.write_json(out / "riemann_report.json",
                           {"kappa": exc.kappa, "solved": False, "dimension": abs(exc.kappa), "message": str(exc)})
        print(f"kappa={exc.kappa}: {exc}")
        return EXIT_OBSTRUCTION
    formats.write_periodic_grid(out / "phi_plus.csv", sol.Phi_plus)
    formats.write_periodic_grid(out / "phi_minus.csv", sol.Phi_minus)
    dp, dm = sol.factorization.analyticity_defect()
    report = {"kappa": 0, "solved": True, "residual_max": sol.residual,
              "factorization_product_error": sol.factorization.product_error(G),
              "analyticity_defect_plus": dp, "analyticity_defect_minus": dm}
    formats.write_json(out / "riemann_report.json", report)
    print(f"kappa=0 residual={sol.residual:.3g}")
    return EXIT_OK


def load_problem(cfg: RunConfig) -> tuple[HalfSpaceProblem, dict]:
    values = dict(cfg.values)
    base = cfg.base
    if cfg.get("problem"):
        path = Path(cfg.get("problem"))
        if not path.exists():
            raise InputError(f"problem file {path} not found")
        file_values = formats.read_kv(path)
        # problem file values sit below explicit flags
        for key, val in file_values.items():
            if key not in cfg.explicit:
                values[key] = val
        base = path.parent
    kernel = formats.parse_kernel_ref(values["kernel"], base)
    m = int(values.get("m", kernel.m))
    if "box" in values:
        lat, _, depth = values["box"].lower().partition("x")
        L2, D = (int(lat), int(depth)) if depth else (0, int(lat))
    else:
        L2, D = 2 * int(values.get("L", 0)), int(values["D"])
    shape = ((L2,) * (m - 1)) + (D,)
    rhs_ref = values.get("rhs", "constant:1")
    if rhs_ref.startswith("constant:"):
        rhs = np.full(shape, formats.parse_complex(rhs_ref.split(":", 1)[1]))
    elif rhs_ref.startswith("random:"):
        rng = np.random.default_rng(int(rhs_ref.split(":", 1)[1]))
        rhs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    else:
        rhs = formats.read_box_grid(base / rhs_ref, shape)
    p = HalfSpaceProblem(m, float(formats._fraction(values["h"])), formats.parse_complex(values["a"]),
                         kernel, rhs, depth_pad=int(values.get("depth-pad", 0)))
    return p, values


def cmd_solve(cfg: RunConfig) -> int:
    p, values = load_problem(cfg)
    out = cfg.out
    method = values["method"]
    if method not in ("dense", "iterative", "wiener-hopf"):
        raise InputError(f"unknown method {method!r}")
    try:
        checks = solvability_gate(p)
    except SolvabilityObstruction as exc:
        formats.write_json(out / "solve_report.json", {
            "solved": False, "kappa": exc.kappa,
            "slice_failures": [{"xi_prime": list(x), "kappa": k} for x, k in exc.failures],
            "message": str(exc),
        })
        print(str(exc))
        return EXIT_OBSTRUCTION
    log.info("all %d slices have index 0", len(checks))
    tol = float(values["tol"])
    if method == "dense":
        rep = solve_dense(p)
    elif method == "wiener-hopf":
        rep = solve_wiener_hopf(p)
    else:
        rep = solve_truncated(p, tol=tol)
    formats.write_box_grid(out / "solution.csv", rep.solution)
    formats.write_json(out / "solve_report.json", {"solved": True, **rep.summary()})
    print(f"{rep.method}: residual_max={rep.residual_max:.3g} iterations={rep.iterations}")
    return EXIT_OK


HANDLERS = {
    "symbol": cmd_symbol,
    "index": cmd_index,
    "transmission": cmd_transmission,
    "verify": cmd_verify,
    "riemann": cmd_riemann,
    "solve": cmd_solve,
}


def run(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(ns)
        return HANDLERS[cfg.command](cfg)
    except IndexObstruction as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    except (InputError, KernelError, FileNotFoundError, KeyError, ValueError, OSError,
            EllipticityError, SingularProblem, WindingError, SymbolVanishes) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
