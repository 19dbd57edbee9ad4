"""Dense complex matrix algebra for finite-dimensional quantum systems.

All operators are dense numpy arrays of ``complex128``.  Composite indices
follow the row-major convention ``|i>_A (x) |b>_B  <->  i * dim_b + b``
throughout the package, which makes partial traces and Schmidt reshapes
plain ``reshape`` calls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Centralized tolerances.  Double precision keeps residuals orders of
# magnitude below these for the dimensions this package targets (<= 256).
HERMITICITY_TOL = 1e-10   # max-entry defect relative to the largest entry
UNITARITY_TOL = 1e-10     # Frobenius norm of W^H W - I
TRACE_TOL = 1e-10         # |tr(rho) - 1|
PSD_FLOOR = -1e-10        # smallest admissible state eigenvalue
PURE_NORM_TOL = 1e-12     # | ||psi||^2 - 1 |
SCHMIDT_RANK_TOL = 1e-10  # coefficients below this count as zero
ENTROPY_EIGVAL_FLOOR = 1e-12


class InvariantViolation(RuntimeError):
    """An identity that must hold by construction was numerically breached."""


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting non-finite entries."""
    out = np.asarray(m, dtype=np.complex128)
    if out.ndim != 2:
        raise ValueError(f"{name}: expected a 2-D array, got ndim={out.ndim}")
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise ValueError(f"{name}: entries must be finite")
    return out


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D complex128 array, rejecting non-finite entries."""
    out = np.asarray(v, dtype=np.complex128)
    if out.ndim != 1:
        raise ValueError(f"{name}: expected a 1-D array, got ndim={out.ndim}")
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise ValueError(f"{name}: entries must be finite")
    return out


def require_square(m, name: str = "matrix") -> np.ndarray:
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name}: expected square, got {m.shape[0]}x{m.shape[1]}")
    return m


def hermiticity_defect(m) -> float:
    """Max-entry distance to the adjoint, relative to the largest entry."""
    m = require_square(m)
    scale = float(np.abs(m).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(m - m.conj().T).max() / scale)


def require_hermitian(m, tol: float = HERMITICITY_TOL, name: str = "matrix") -> np.ndarray:
    m = require_square(m, name)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"{name}: not Hermitian (relative defect {defect:.3e} > {tol:.0e})")
    return m


def check_density_matrix(rho, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = require_hermitian(rho, name=name)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name}: trace is {tr:.12g}, expected 1 within {TRACE_TOL:.0e}")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w[0] < PSD_FLOOR:
        raise ValueError(f"{name}: not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return rho


def check_pure_state(psi, name: str = "psi") -> np.ndarray:
    """Validate normalization of a state vector; return the array."""
    psi = as_vector(psi, name)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > PURE_NORM_TOL:
        raise ValueError(f"{name}: not normalized (||psi||^2 = {norm2:.15g})")
    return psi


def maximally_mixed(dim: int) -> np.ndarray:
    """Identity over dimension: the state with no information at all."""
    if dim < 1:
        raise ValueError(f"maximally_mixed: dim must be >= 1, got {dim}")
    return np.eye(dim, dtype=np.complex128) / dim


def kron(a, b) -> np.ndarray:
    """Kronecker product; composite row index is ``i_a * rows_b + i_b``."""
    return np.kron(as_matrix(a, "kron operand a"), as_matrix(b, "kron operand b"))


def partial_trace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``m`` must be square of dimension ``dim_a * dim_b`` with the package's
    composite index convention.  ``keep`` selects the surviving factor,
    ``"A"`` or ``"B"``.  The trace of the result equals the trace of ``m``.
    """
    m = require_square(m, "partial_trace input")
    if dim_a < 1 or dim_b < 1 or m.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"partial_trace: matrix dim {m.shape[0]} does not factor as {dim_a} x {dim_b}"
        )
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", r)
    if keep == "B":
        return np.einsum("abac->bc", r)
    raise ValueError(f"partial_trace: keep must be 'A' or 'B', got {keep!r}")


def eigh(h, name: str = "matrix") -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition, eigenvalues ascending.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v.conj().T`` and unitary
    ``v``.  Non-Hermitian input is rejected with the measured defect.
    """
    h = require_hermitian(h, name=name)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return w, v


def propagator(h, t: float) -> np.ndarray:
    """exp(-i h t) via eigendecomposition; exactly unitary for Hermitian h."""
    w, v = eigh(h, name="propagator generator")
    return (v * np.exp(-1j * w * float(t))) @ v.conj().T


def trace_norm(m) -> float:
    """Sum of singular values.

    Hermitian inputs (relative defect <= 1e-8) use eigenvalue moduli; the
    general case uses the square root of the spectrum of ``m^H m``.
    """
    m = require_square(m, "trace_norm input")
    if hermiticity_defect(m) <= 1e-8:
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        return float(np.abs(w).sum())
    w = np.linalg.eigvalsh(m.conj().T @ m)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def purity(rho) -> float:
    """tr(rho^2), real part."""
    rho = require_square(rho, "purity input")
    return float(np.trace(rho @ rho).real)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Bi-orthogonal form of a bipartite pure state.

    ``coeffs`` are nonnegative and descending; column ``k`` of
    ``left_vectors`` / ``right_vectors`` carries the k-th Schmidt pair, so
    the state is ``sum_k coeffs[k] * kron(left[:, k], right[:, k])``.
    """

    coeffs: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coeffs > SCHMIDT_RANK_TOL))

    def reconstruct(self) -> np.ndarray:
        dim = self.left_vectors.shape[0] * self.right_vectors.shape[0]
        out = np.zeros(dim, dtype=np.complex128)
        for k, c in enumerate(self.coeffs):
            out += c * np.kron(self.left_vectors[:, k], self.right_vectors[:, k])
        return out


def schmidt(psi, dim_a: int, dim_b: int) -> SchmidtDecomposition:
    """Schmidt decomposition of a normalized state across ``dim_a x dim_b``."""
    psi = check_pure_state(psi)
    if psi.size != dim_a * dim_b:
        raise ValueError(f"schmidt: state dim {psi.size} does not factor as {dim_a} x {dim_b}")
    u, s, vh = np.linalg.svd(psi.reshape(dim_a, dim_b), full_matrices=False)
    return SchmidtDecomposition(coeffs=s, left_vectors=u, right_vectors=vh.T)


def von_neumann_entropy(rho) -> float:
    """Entropy -sum(p ln p) in nats; eigenvalues below 1e-12 contribute 0."""
    rho = check_density_matrix(rho)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > ENTROPY_EIGVAL_FLOOR]
    return float(-(w * np.log(w)).sum())
