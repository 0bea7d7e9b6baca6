"""
Quantum Core Service.

This module contains the dense complex linear-algebra kernel: Pauli
operators, observables (Hermitian involutions), mutually anticommuting sets,
Bell-pair and Werner link states, partial traces and subsystem permutations.

Qubit ordering for a link with c copies: Alice's c qubits first, then Bob's
c qubits. All link states and hub-side operators follow this convention.
"""

import json
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from ..exceptions import (
    CapacityError,
    DimensionMismatchError,
    DomainError,
    InvalidScenarioError,
    NumericConsistencyError,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
INVOLUTION_TOL = 1e-10
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
MAX_COPIES = 6

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    return reduce(np.kron, ops, np.eye(1, dtype=complex))


def pauli_string(word: str) -> np.ndarray:
    """Tensor product of Paulis, e.g. 'ZX' -> Z (x) X."""
    return kron_all([PAULIS[letter] for letter in word])


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol)


def is_involution(matrix: np.ndarray, tol: float = INVOLUTION_TOL) -> bool:
    identity = np.eye(matrix.shape[0], dtype=complex)
    return bool(np.max(np.abs(matrix @ matrix - identity), initial=0.0) <= tol)


def _square(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NumericConsistencyError("matrix has non-finite entries")
    return matrix


@dataclass(frozen=True)
class Observable:
    """Binary-outcome observable: a Hermitian involution with an optional (party, setting) label."""
    matrix: np.ndarray
    label: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        matrix = _square(self.matrix)
        if not is_hermitian(matrix):
            raise NumericConsistencyError(f"observable {self.label} is not Hermitian")
        if not is_involution(matrix):
            raise NumericConsistencyError(f"observable {self.label} does not square to identity")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def relabel(self, party: int, setting: int) -> "Observable":
        return Observable(self.matrix, (party, setting))


@dataclass(frozen=True)
class LinkState:
    """Density operator shared by one edge party and the hub, Alice's side first."""
    matrix: np.ndarray
    copies: int
    visibility_per_copy: float = 1.0
    dims: Tuple[int, int] = field(default=(0, 0))

    def __post_init__(self):
        matrix = _square(self.matrix)
        dims = self.dims if self.dims != (0, 0) else (2 ** self.copies, 2 ** self.copies)
        if dims[0] * dims[1] != matrix.shape[0]:
            raise DimensionMismatchError(f"state of size {matrix.shape[0]} does not match dims {dims}")
        if abs(np.trace(matrix) - 1.0) > TRACE_TOL * max(1, matrix.shape[0]):
            raise NumericConsistencyError(f"state trace is {np.trace(matrix)}, expected 1")
        if not is_hermitian(matrix):
            raise NumericConsistencyError("state is not Hermitian")
        smallest = float(linalg.eigvalsh(matrix)[0])
        if smallest < PSD_FLOOR:
            raise NumericConsistencyError(f"state has negative eigenvalue {smallest}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", tuple(dims))

    @property
    def dim_a(self) -> int:
        return self.dims[0]

    @property
    def dim_b(self) -> int:
        return self.dims[1]

    def alice_marginal(self) -> np.ndarray:
        return partial_trace(self.matrix, list(self.dims), keep=[0])

    def bob_marginal(self) -> np.ndarray:
        return partial_trace(self.matrix, list(self.dims), keep=[1])

    def conjugated(self, unitary_a: np.ndarray) -> "LinkState":
        """Return (U (x) I) rho (U (x) I)^dagger."""
        full = np.kron(unitary_a, np.eye(self.dim_b, dtype=complex))
        return LinkState(full @ self.matrix @ full.conj().T, self.copies, self.visibility_per_copy, self.dims)


def partial_trace(matrix: np.ndarray, dims: List[int], keep: Sequence[int]) -> np.ndarray:
    """
    Trace out every subsystem not listed in keep.

    Args:
        matrix: Operator on the tensor product of subsystems with sizes dims
        dims: Subsystem dimensions
        keep: Indices of subsystems to keep (returned in ascending order)

    Returns:
        Reduced operator
    """
    total = int(np.prod(dims))
    if matrix.shape != (total, total):
        raise DimensionMismatchError(f"matrix of shape {matrix.shape} does not match dims {dims}")
    keep = sorted(keep)
    tensor = matrix.reshape(list(dims) + list(dims))
    remaining = len(dims)
    for axis in sorted(set(range(len(dims))) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=axis, axis2=axis + remaining)
        remaining -= 1
    kept = int(np.prod([dims[i] for i in keep])) if keep else 1
    return tensor.reshape(kept, kept)


def permute_subsystems(matrix: np.ndarray, dims: List[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output subsystem j is input subsystem perm[j]."""
    count = len(dims)
    if sorted(perm) != list(range(count)):
        raise DimensionMismatchError(f"{perm} is not a permutation of {count} subsystems")
    tensor = np.asarray(matrix).reshape(list(dims) + list(dims))
    axes = list(perm) + [p + count for p in perm]
    size = matrix.shape[0]
    return tensor.transpose(axes).reshape(size, size)


def anticommuting_set(m: int, party: int = 1) -> List[Observable]:
    """
    Build m pairwise anticommuting Hermitian involutions on floor(m/2) qubits.

    Jordan-Wigner construction: for qubit j the pair Z..Z X I..I and
    Z..Z Y I..I, plus Z..Z on every qubit when m is odd.

    Args:
        m: Number of observables
        party: Party index stored in the labels

    Returns:
        List of Observable labelled (party, 1..m)

    Raises:
        InvalidScenarioError: If m < 2
    """
    if m < 2:
        raise InvalidScenarioError(f"anticommuting set needs m >= 2, got {m}")
    qubits = m // 2
    words = []
    for j in range(qubits):
        prefix, suffix = "Z" * j, "I" * (qubits - j - 1)
        words.append(prefix + "X" + suffix)
        words.append(prefix + "Y" + suffix)
    if m % 2:
        words.append("Z" * qubits)
    return [Observable(pauli_string(word), (party, x + 1)) for x, word in enumerate(words)]


def _check_copies(c: int) -> None:
    if c < 1:
        raise InvalidScenarioError(f"number of copies must be >= 1, got {c}")
    if c > MAX_COPIES:
        raise CapacityError(f"{c} copies need dimension 4^{c}, limit is {MAX_COPIES} copies")


def bell_copies(c: int) -> LinkState:
    """c copies of |phi+>, equal to (1/sqrt d) sum_j |j>_A |j>_B with d = 2^c."""
    _check_copies(c)
    d = 2 ** c
    psi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return LinkState(np.outer(psi, psi.conj()), copies=c, visibility_per_copy=1.0)


def werner_copies(c: int, v: float) -> LinkState:
    """
    Product of c Werner states v|phi+><phi+| + (1-v) I/4.

    Args:
        c: Number of copies
        v: Visibility of each copy

    Returns:
        LinkState with Alice's qubits first

    Raises:
        DomainError: If v is outside [0, 1]
    """
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {v}")
    _check_copies(c)
    phi = bell_copies(1).matrix
    single = v * phi + (1.0 - v) * np.eye(4, dtype=complex) / 4.0
    product = kron_all([single] * c)
    if c > 1:
        # A1 B1 A2 B2 ... -> A1 A2 ... B1 B2 ...
        perm = list(range(0, 2 * c, 2)) + list(range(1, 2 * c, 2))
        product = permute_subsystems(product, [2] * (2 * c), perm)
    return LinkState(product, copies=c, visibility_per_copy=float(v))


def transpose_on_bob(obs: Observable) -> Observable:
    """Computational-basis transpose, which moves A (x) I acting on |phi+> to I (x) A^T."""
    return Observable(obs.matrix.T, obs.label)


def expectation(state: np.ndarray, operator: np.ndarray, tol: float = 1e-10) -> float:
    """tr[rho O] with the imaginary part checked against tol and dropped."""
    if state.shape != operator.shape:
        raise DimensionMismatchError(f"state {state.shape} and operator {operator.shape} differ in size")
    value = np.trace(state @ operator)
    if abs(value.imag) > tol:
        raise NumericConsistencyError(f"expectation value {value} is not real")
    return float(value.real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary."""
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_involution(dim: int, rng: np.random.Generator,
                      signature: Optional[int] = None) -> np.ndarray:
    """
    Haar-random Hermitian involution U diag(+-1) U^dagger.

    Args:
        dim: Matrix dimension
        rng: Random generator
        signature: Number of +1 eigenvalues; random when omitted

    Returns:
        Hermitian involution as a dense matrix
    """
    plus = int(rng.integers(0, dim + 1)) if signature is None else signature
    diagonal = np.array([1.0] * plus + [-1.0] * (dim - plus))
    unitary = random_unitary(dim, rng)
    matrix = (unitary * diagonal) @ unitary.conj().T
    return (matrix + matrix.conj().T) / 2


def sign_projection(hermitian: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Closest Hermitian involution in operator norm: sign(H).

    Zero eigenvalues map to +1.

    Returns:
        (sign(H), True when a zero eigenvalue was encountered)
    """
    hermitian = (hermitian + hermitian.conj().T) / 2
    values, vectors = linalg.eigh(hermitian)
    scale = max(float(np.max(np.abs(values), initial=0.0)), 1.0)
    degenerate = bool(np.any(np.abs(values) <= 1e-12 * scale))
    signs = np.where(values >= -1e-12 * scale, 1.0, -1.0)
    matrix = (vectors * signs) @ vectors.conj().T
    return (matrix + matrix.conj().T) / 2, degenerate


def matrix_to_json(matrix: np.ndarray) -> dict:
    """Row-major list of [re, im] pairs with a dim header."""
    matrix = _square(matrix)
    return {
        "dim": int(matrix.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in matrix.reshape(-1)],
    }


def matrix_from_json(payload: dict) -> np.ndarray:
    dim = int(payload["dim"])
    entries = payload["entries"]
    if len(entries) != dim * dim:
        raise DimensionMismatchError(f"expected {dim * dim} entries, got {len(entries)}")
    return np.array([complex(re, im) for re, im in entries], dtype=complex).reshape(dim, dim)


def observables_to_json(observables: Sequence[Sequence[Observable]]) -> str:
    """Serialize per-party observable lists."""
    return json.dumps([[matrix_to_json(obs.matrix) for obs in party] for party in observables])


def observables_from_json(payload: str) -> List[List[Observable]]:
    data = json.loads(payload)
    return [
        [Observable(matrix_from_json(item), (k + 1, x + 1)) for x, item in enumerate(party)]
        for k, party in enumerate(data)
    ]
