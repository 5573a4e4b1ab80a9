"""Discrete Calderon-Zygmund operators on lattices and their half-space solvability."""
from .kernel import KernelError, KernelSpec, angular_mode, eval_kernel, inverse_x, make_kernel, riesz, zero_kernel
from .riemann import (
    Factorization, IndexObstruction, PeriodicGrid, RiemannProblem, RiemannSolution, WindingError,
    compute_index, factorize, solve_riemann,
)
from .solvability import (
    SymbolVanishes, TransmissionError, continuous_winding, discrete_winding,
    main_theorem_report, paired_coefficient, transmission_check,
)
from .solver import (
    EllipticityError, HalfSpaceProblem, SingularProblem, SolvabilityObstruction, apply_operator,
    solvability_gate, solve_dense, solve_truncated, solve_wiener_hopf,
)
from .symbol import (
    PartialSumPlan, continuous_symbol, discrete_slice, discrete_symbol,
    lemma1_convergence_report, sample_symbol_grid,
)

__version__ = "0.1.0"
