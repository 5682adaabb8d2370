"""Drift estimation for mixed fractional Brownian motion."""

from ._core import (
    DiscreteSolution,
    DmfbmError,
    DomainError,
    EstimationResult,
    Formulation,
    Grid,
    GridMismatchError,
    HurstMode,
    HurstPair,
    KernelModel,
    MixedPath,
    MonteCarloSummary,
    SingularMatrixError,
    beta,
    chi_square_band,
    estimate_theta,
    g_rhs,
    gamma,
    hyp2f1,
    mixed_path,
    run_montecarlo,
    solve_mle_h,
)

__all__ = [name for name in dir() if not name.startswith("_")]
