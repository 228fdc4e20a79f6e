"""Numerical inverse scattering for the nonlocal nonlinear Schrodinger equation

    i q_t + q_xx + 2 sigma q(x,t)^2 conj(q(-x,t)) = 0.

Pipeline: :func:`scattering_coefficients` -> :func:`reflection_coefficients`
-> :func:`evolve_reflection` -> :func:`reconstruct_q`, with
:func:`split_step` as an independent PDE reference.
"""

__version__ = "0.1.0"

from .config import A_LOWER_BOUND, R_UPPER_BOUND, SMALL_NORM_THRESHOLD, TOLERANCES, reference_kgrid, reference_xgrid
from .diagnostics import SuiteInputs, lipschitz_probe, run_invariant_suite
from .errors import (ConfigurationError, DivisionHazardError, DomainError, GridError, InstabilityError,
                     InvalidInputError, ISTError, NumericalError, ReconstructionError,
                     SingularEquationError)
from .evolution import evolve_reflection, ist_solve
from .grid import (SampledField, UniformGrid, fourier_pair, trapezoid_integrate, weighted_norm)
from .plemelj import HalfLineMultiplier, cauchy_offaxis, operator_norm_check, plemelj
from .reconstruction import reconstruct_q, reconstruct_q_mirror, roundtrip_report
from .report import DiagnosticsReport, ReportItem
from .rh import build_jump, jump_residual, positivity_diagnostics, solve_rh
from .scattering import (Potential, ReflectionPair, ScatteringData, box_potential, compute_s_fields,
                         gaussian_potential, march_jost, no_resonance_check, reflection_coefficients,
                         scattering_coefficients, zero_potential)
from .splitstep import conserved_quantity, split_step
