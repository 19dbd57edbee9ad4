"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from tpslab import (
    FactorLayout,
    RandomStream,
    TypeIProjection,
    bell_pair,
    maximally_mixed,
    mix_seed,
    structure_from_grouping,
    structure_from_unitary,
    teleport_state,
)


def stream(seed: int, trial: int = 0) -> RandomStream:
    return RandomStream(mix_seed(seed, trial))


def random_pure_density(dim: int, seed: int, trial: int = 0) -> np.ndarray:
    v = stream(seed, trial).haar_pure(dim)
    return np.outer(v, v.conj())


def haar_structure(total: int, dim_s: int, seed: int, trial: int = 0):
    return structure_from_unitary(
        stream(seed, trial).haar_unitary(total), dim_s, total // dim_s, label=f"haar-{seed}-{trial}"
    )


def max_mixed_spec(dim_e: int) -> TypeIProjection:
    return TypeIProjection(maximally_mixed(dim_e))


def teleport_setup(u=None):
    """The three-qubit register with its two standard splits."""
    if u is None:
        u = np.array([1.0, 0.0], dtype=np.complex128)
    layout = FactorLayout((2, 2, 2))
    s_a = structure_from_grouping(layout, (0,), label="1|(2,3)")
    s_b = structure_from_grouping(layout, (0, 1), label="(1,2)|3")
    psi = teleport_state(u)
    rho = np.outer(psi, psi.conj())
    return layout, s_a, s_b, psi, rho


def bell_density() -> np.ndarray:
    phi = bell_pair()
    return np.outer(phi, phi.conj())
