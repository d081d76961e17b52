"""Truncated Fock-space and tensor-product operator algebra.

Every operator in the package lives on one of the small spaces defined
here: a single truncated bosonic mode, the three-level qubit, the
two-mode resonator space, or the full qubit (x) mode_a (x) mode_b
product.  Basis indexing is row-major in the fixed factor order
qubit (x) mode_a (x) mode_b, so a product basis state maps to the flat
index ((q * (cutoff_a + 1) + n_a) * (cutoff_b + 1) + n_b).  Golden files
and serialized spectra rely on this layout staying fixed.

Matrices are stored sparse (CSC) once the total dimension reaches
``SPARSE_THRESHOLD`` and dense below it; Lindblad superoperators scale
as dim**2, so sparsity is what keeps the steady-state solves tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError

#: Qubit level labels in fixed index order: g=0, r=1, e=2.
LEVELS = ("g", "r", "e")

#: Total dimension at and above which operator storage switches to sparse.
SPARSE_THRESHOLD = 64


@dataclass(frozen=True)
class FockSpace:
    """A single bosonic mode truncated at Fock index ``cutoff``."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise InvalidArgumentError(f"mode cutoff must be >= 1, got {self.cutoff}")

    @property
    def factors(self) -> tuple[int, ...]:
        return (self.cutoff + 1,)

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class QubitSpace:
    """The three-level qubit with levels g, r, e."""

    @property
    def factors(self) -> tuple[int, ...]:
        return (3,)

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True)
class TwoModeSpec:
    """Resonator-only space mode_a (x) mode_b (qubit factor absent)."""

    cutoff_a: int
    cutoff_b: int

    def __post_init__(self):
        if self.cutoff_a < 1:
            raise InvalidArgumentError(f"cutoff_a must be >= 1, got {self.cutoff_a}")
        if self.cutoff_b < 2:
            raise InvalidArgumentError(f"cutoff_b must be >= 2, got {self.cutoff_b}")

    @property
    def factors(self) -> tuple[int, ...]:
        return (self.cutoff_a + 1, self.cutoff_b + 1)

    @property
    def dim(self) -> int:
        return (self.cutoff_a + 1) * (self.cutoff_b + 1)

    def index(self, n_a: int, n_b: int) -> int:
        if not (0 <= n_a <= self.cutoff_a and 0 <= n_b <= self.cutoff_b):
            raise InvalidArgumentError(
                f"occupation ({n_a},{n_b}) outside cutoffs ({self.cutoff_a},{self.cutoff_b})"
            )
        return n_a * (self.cutoff_b + 1) + n_b


@dataclass(frozen=True)
class HilbertSpec:
    """Full product space qubit (x) mode_a (x) mode_b.

    ``qubit_dim`` is fixed at 3 (levels g, r, e); the mode cutoffs are
    the maximum retained Fock indices.
    """

    cutoff_a: int
    cutoff_b: int
    qubit_dim: int = 3

    def __post_init__(self):
        if self.qubit_dim != 3:
            raise InvalidArgumentError(f"qubit_dim is fixed at 3, got {self.qubit_dim}")
        if self.cutoff_a < 1:
            raise InvalidArgumentError(f"cutoff_a must be >= 1, got {self.cutoff_a}")
        if self.cutoff_b < 2:
            raise InvalidArgumentError(f"cutoff_b must be >= 2, got {self.cutoff_b}")

    @property
    def factors(self) -> tuple[int, ...]:
        return (3, self.cutoff_a + 1, self.cutoff_b + 1)

    @property
    def dim(self) -> int:
        return 3 * (self.cutoff_a + 1) * (self.cutoff_b + 1)

    def index(self, q: str, n_a: int, n_b: int) -> int:
        """Flat basis index of |q; n_a; n_b>."""
        if q not in LEVELS:
            raise InvalidArgumentError(f"unknown qubit level {q!r}; expected one of {LEVELS}")
        if not (0 <= n_a <= self.cutoff_a and 0 <= n_b <= self.cutoff_b):
            raise InvalidArgumentError(
                f"occupation ({n_a},{n_b}) outside cutoffs ({self.cutoff_a},{self.cutoff_b})"
            )
        return (LEVELS.index(q) * (self.cutoff_a + 1) + n_a) * (self.cutoff_b + 1) + n_b

    def two_mode(self) -> TwoModeSpec:
        return TwoModeSpec(self.cutoff_a, self.cutoff_b)


Space = Union[FockSpace, QubitSpace, TwoModeSpec, HilbertSpec]

#: slot name -> factor position for each multi-factor space type.
_SLOTS = {
    HilbertSpec: {"qubit": 0, "mode_a": 1, "mode_b": 2},
    TwoModeSpec: {"mode_a": 0, "mode_b": 1},
}


def _freeze(matrix):
    if isinstance(matrix, np.ndarray):
        matrix.setflags(write=False)
    else:
        matrix.data.setflags(write=False)
    return matrix


class Operator:
    """Complex matrix on one of the spaces above, with dimension metadata.

    Instances are immutable after construction and safe to share across
    workers.  Arithmetic returns new operators; the Hermitian flag is
    propagated only through operations that preserve it.
    """

    __slots__ = ("space", "matrix", "hermitian")

    def __init__(self, space: Space, matrix, hermitian: bool | None = None):
        dim = space.dim
        if matrix.shape != (dim, dim):
            raise InvalidArgumentError(
                f"matrix shape {matrix.shape} does not match space dimension {dim}"
            )
        if sp.issparse(matrix):
            matrix = matrix.tocsc().astype(np.complex128)
        else:
            matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
        if hermitian:
            dev = _max_abs(matrix - matrix.conj().T)
            if dev > 1e-12 * max(1.0, _max_abs(matrix)):
                raise InvalidArgumentError(
                    f"operator flagged Hermitian deviates from M = M^dag by {dev:.3e}"
                )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", _freeze(matrix))
        object.__setattr__(self, "hermitian", hermitian)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    # -- representation helpers ------------------------------------------

    @property
    def dim(self) -> int:
        return self.space.dim

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.array(self.matrix)

    def sparse(self) -> sp.csc_matrix:
        if sp.issparse(self.matrix):
            return self.matrix
        return sp.csc_matrix(self.matrix)

    @staticmethod
    def from_matrix(space: Space, matrix, hermitian: bool | None = None) -> "Operator":
        """Wrap ``matrix``, choosing sparse/dense storage by dimension."""
        if space.dim >= SPARSE_THRESHOLD and not sp.issparse(matrix):
            matrix = sp.csc_matrix(matrix)
        elif space.dim < SPARSE_THRESHOLD and sp.issparse(matrix):
            matrix = matrix.toarray()
        return Operator(space, matrix, hermitian)

    # -- algebra ----------------------------------------------------------

    def _check_same_space(self, other: "Operator"):
        if self.space != other.space:
            raise InvalidArgumentError(f"space mismatch: {self.space} vs {other.space}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        herm = True if (self.hermitian and other.hermitian) else None
        return Operator(self.space, self.matrix + other.matrix, herm)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        herm = True if (self.hermitian and other.hermitian) else None
        return Operator(self.space, self.matrix - other.matrix, herm)

    def __mul__(self, scalar: complex) -> "Operator":
        herm = True if (self.hermitian and np.isreal(scalar)) else None
        return Operator(self.space, self.matrix * scalar, herm)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return self * (-1.0)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, self.hermitian)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return _max_abs(self.matrix - self.matrix.conj().T) <= tol * max(1.0, self.max_abs())

    def norm_fro(self) -> float:
        if sp.issparse(self.matrix):
            return float(np.sqrt((np.abs(self.matrix.data) ** 2).sum()))
        return float(np.linalg.norm(self.matrix))

    def max_abs(self) -> float:
        return _max_abs(self.matrix)

    def element(self, i: int, j: int) -> complex:
        return complex(self.matrix[i, j])

    def __repr__(self):
        kind = "sparse" if sp.issparse(self.matrix) else "dense"
        return f"Operator(dim={self.dim}, {kind}, hermitian={self.hermitian})"


def _max_abs(matrix) -> float:
    if sp.issparse(matrix):
        return float(np.abs(matrix.data).max()) if matrix.nnz else 0.0
    return float(np.abs(matrix).max()) if matrix.size else 0.0


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


@dataclass(frozen=True)
class StateVector:
    """Pure state with amplitudes in the row-major product basis."""

    space: Space
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.space.dim,):
            raise InvalidArgumentError(
                f"amplitude vector of length {amps.shape} does not match dim {self.space.dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on ``space``; dense storage."""

    space: Space
    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.complex128)
        dim = self.space.dim
        if entries.shape != (dim, dim):
            raise InvalidArgumentError(
                f"density matrix shape {entries.shape} does not match dim {dim}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def validate(self, trace_tol: float = 1e-9, herm_tol: float = 1e-10,
                 eig_tol: float = -1e-8) -> None:
        """Raise if the state is unphysical beyond the given tolerances."""
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise InvalidArgumentError(f"trace {tr} deviates from 1 by more than {trace_tol}")
        herm_dev = float(np.abs(self.entries - self.entries.conj().T).max())
        if herm_dev > herm_tol:
            raise InvalidArgumentError(f"Hermiticity deviation {herm_dev:.3e} > {herm_tol}")
        min_eig = float(np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2).min())
        if min_eig < eig_tol:
            raise InvalidArgumentError(f"minimum eigenvalue {min_eig:.3e} < {eig_tol}")


# -- operator builders ----------------------------------------------------


def annihilation(cutoff: int) -> Operator:
    """Single-mode annihilation operator on a mode truncated at ``cutoff``.

    Entry (n-1, n) equals sqrt(n) for 1 <= n <= cutoff; everything else
    is zero.
    """
    space = FockSpace(cutoff)
    mat = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), k=1).astype(np.complex128)
    return Operator(space, mat)


def number_operator(cutoff: int) -> Operator:
    """Single-mode photon-number operator a^dag a."""
    a = annihilation(cutoff)
    n = a.dagger() @ a
    return Operator(n.space, n.matrix, hermitian=True)


def qubit_transition(i: str, j: str) -> Operator:
    """Projector-style operator |i><j| on the qubit (levels g, r, e)."""
    for label in (i, j):
        if label not in LEVELS:
            raise InvalidArgumentError(f"unknown qubit level {label!r}; expected one of {LEVELS}")
    mat = np.zeros((3, 3), dtype=np.complex128)
    mat[LEVELS.index(i), LEVELS.index(j)] = 1.0
    return Operator(QubitSpace(), mat, hermitian=(i == j) or None)


def identity(space: Space) -> Operator:
    dim = space.dim
    if dim >= SPARSE_THRESHOLD:
        return Operator(space, sp.identity(dim, dtype=np.complex128, format="csc"), hermitian=True)
    return Operator(space, np.eye(dim, dtype=np.complex128), hermitian=True)


def embed(op: Operator, slot: str, spec: Space) -> Operator:
    """Embed a single-factor operator as I (x) ... (x) op (x) ... (x) I.

    ``slot`` names the tensor factor ('qubit', 'mode_a' or 'mode_b');
    the factor order is fixed as qubit (x) mode_a (x) mode_b.
    """
    slots = _SLOTS.get(type(spec))
    if slots is None:
        raise InvalidArgumentError(f"cannot embed into single-factor space {spec}")
    if slot not in slots:
        raise InvalidArgumentError(f"unknown slot {slot!r} for {type(spec).__name__}")
    pos = slots[slot]
    factors = spec.factors
    if op.dim != factors[pos]:
        raise InvalidArgumentError(
            f"operator dimension {op.dim} does not match slot {slot!r} dimension {factors[pos]}"
        )
    use_sparse = spec.dim >= SPARSE_THRESHOLD
    if use_sparse:
        parts = [sp.identity(d, dtype=np.complex128, format="csc") for d in factors]
        parts[pos] = op.sparse()
        mat = reduce(lambda x, y: sp.kron(x, y, format="csc"), parts)
    else:
        parts = [np.eye(d, dtype=np.complex128) for d in factors]
        parts[pos] = op.dense()
        mat = reduce(np.kron, parts)
    return Operator(spec, mat, op.hermitian)


def basis_state(q: str, n_a: int, n_b: int, spec: HilbertSpec) -> StateVector:
    """Product basis state |q; n_a; n_b> on the full space."""
    amps = np.zeros(spec.dim, dtype=np.complex128)
    amps[spec.index(q, n_a, n_b)] = 1.0
    return StateVector(spec, amps)


def mode_basis_state(n_a: int, n_b: int, spec: TwoModeSpec) -> StateVector:
    """Product basis state |n_a; n_b> on the resonator-only space."""
    amps = np.zeros(spec.dim, dtype=np.complex128)
    amps[spec.index(n_a, n_b)] = 1.0
    return StateVector(spec, amps)


def expectation(state: StateVector | DensityMatrix, op: Operator) -> complex:
    """<psi|M|psi> for a state vector, Tr(rho M) for a density matrix."""
    if isinstance(state, StateVector):
        if state.space.dim != op.dim:
            raise InvalidArgumentError(
                f"state dimension {state.space.dim} does not match operator dimension {op.dim}"
            )
        return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    if isinstance(state, DensityMatrix):
        if state.space.dim != op.dim:
            raise InvalidArgumentError(
                f"state dimension {state.space.dim} does not match operator dimension {op.dim}"
            )
        if sp.issparse(op.matrix):
            return complex(op.matrix.multiply(state.entries.T).sum())
        return complex((state.entries.T * op.matrix).sum())
    raise InvalidArgumentError(f"unsupported state type {type(state).__name__}")
