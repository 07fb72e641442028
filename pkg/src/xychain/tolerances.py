"""Numerical tolerances shared by every module.

All thresholds live in a single frozen record so that validation code and
tests agree on what "equal" means.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute thresholds used for validation.

    Attributes
    ----------
    state_norm : float
        Allowed deviation of a state vector's norm from 1.
    unitary : float
        Max entry of ``U^dagger U - I`` for a gate matrix to count as unitary.
    hermitian : float
        Max entry of ``A - A^dagger`` for a matrix to count as Hermitian.
    trace : float
        Allowed deviation of a density matrix trace from 1.
    psd : float
        Most negative eigenvalue tolerated in a density matrix.
    eig_residual : float
        Relative residual bound ``||A V - V diag(w)|| / max(1, ||A||)``.
    eig_cutoff : float
        Eigenvalues below this are dropped from entropy sums.
    imag : float
        Largest imaginary part tolerated when a real result is expected.
    jacobi_offdiag : float
        Convergence threshold of the Jacobi sweeps, relative to ``||A||``.
    """

    state_norm: float = 1e-9
    unitary: float = 1e-10
    hermitian: float = 1e-10
    trace: float = 1e-9
    psd: float = 1e-9
    eig_residual: float = 1e-9
    eig_cutoff: float = 1e-12
    imag: float = 1e-9
    jacobi_offdiag: float = 1e-14


TOL = Tolerances()
