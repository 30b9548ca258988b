"""stoqlab: three independently built engines (Langevin ensemble,
phase-space grid solver, amplitude field equation) for a vacuum-noise
model of particle dynamics, plus the exact operator-ordering machinery
that connects its classical averages to symmetric-ordered quantum
expectation values."""

from .model import (PhysicalConstants, FieldSpec, EffectivePotential,
                    FieldDomainError, eval_hamiltonian, eval_force_fields)

__all__ = [
    "PhysicalConstants",
    "FieldSpec",
    "EffectivePotential",
    "FieldDomainError",
    "eval_hamiltonian",
    "eval_force_fields",
]

__version__ = "0.1.0"
