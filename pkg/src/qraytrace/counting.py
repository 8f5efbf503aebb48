"""Quantum counting: closed-form outcome law, exact sampler and statevector simulator.

Grover iterate convention: ``G = (2|psi><psi| - I) O_f`` with ``|psi>`` uniform.
Its eigenphases are ``+-theta`` (in turns) with ``theta = arcsin(sqrt(S/N)) / pi``,
so phase estimation on ``G`` reproduces the folded Fejer-kernel law of
:func:`counting_distribution` exactly. The other common arrangement
``H O_0 H O_f`` equals ``-G`` and would shift every measured phase by 1/2 under
controlled application.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError

MAX_CIRCUIT_QUBITS = 22
_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class CountingConfig:
    n: int
    t: int
    B: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.t < 1:
            raise ConfigError(f"need n >= 1 and t >= 1, got n={self.n}, t={self.t}")
        if self.B < 1:
            raise ConfigError("B must be >= 1")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def T(self) -> int:
        return 1 << self.t

    @property
    def queries(self) -> int:
        """Oracle applications spent: ``T - 1`` per phase estimation, ``B`` repetitions."""
        return (self.T - 1) * self.B


@dataclass(frozen=True, eq=False)
class BooleanOracle:
    marks: np.ndarray

    def __post_init__(self):
        marks = np.ascontiguousarray(self.marks, dtype=bool)
        n = marks.size
        if n < 1 or n & (n - 1):
            raise ConfigError(f"oracle domain size must be a power of two, got {n}")
        marks.setflags(write=False)
        object.__setattr__(self, "marks", marks)

    @classmethod
    def from_indices(cls, N: int, marked) -> "BooleanOracle":
        marks = np.zeros(N, dtype=bool)
        marks[np.asarray(list(marked), dtype=np.int64)] = True
        return cls(marks)

    @property
    def N(self) -> int:
        return self.marks.size

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def S(self) -> int:
        return int(np.count_nonzero(self.marks))


@dataclass(frozen=True)
class CountingOutcome:
    """A folded measurement ``theta_tilde = index / T`` with ``0 <= index <= T/2``."""

    index: int
    T: int

    def __post_init__(self):
        if not 0 <= self.index <= self.T // 2:
            raise ValueError(f"outcome index {self.index} outside [0, {self.T // 2}]")

    @property
    def theta_tilde(self) -> float:
        return self.index / self.T


# ------------------------------------------------------------------ closed form

def theta_from_count(S, N):
    S = np.asarray(S)
    if np.any(S < 0) or np.any(S > N):
        raise ValueError(f"count must lie in [0, {N}]")
    out = np.arcsin(np.sqrt(S / N)) / np.pi
    return float(out) if out.ndim == 0 else out


def count_from_theta(theta, N):
    out = N * np.sin(np.pi * np.asarray(theta, dtype=np.float64)) ** 2
    return float(out) if out.ndim == 0 else out


def fejer(x, T: int) -> np.ndarray:
    """``(sin(T pi x) / (T sin(pi x)))**2`` with removable singularities filled exactly.

    Where ``T x`` is within 1e-12 of an integer ``k`` the value is 1 when ``k`` is a
    multiple of ``T`` (``x`` integral) and 0 otherwise.
    """
    x = np.asarray(x, dtype=np.float64)
    tx = T * x
    k = np.rint(tx)
    singular = np.abs(tx - k) < _SINGULAR_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (np.sin(np.pi * tx) / (T * np.sin(np.pi * x))) ** 2
    return np.where(singular, np.where(np.mod(k, T) == 0, 1.0, 0.0), val)


def outcome_likelihood(index, theta, T: int) -> np.ndarray:
    """``P(theta_tilde = index / T | theta)``, broadcasting over ``index`` and ``theta``."""
    index = np.asarray(index)
    tt = index / T
    theta = np.asarray(theta, dtype=np.float64)
    p = fejer(tt - theta, T)
    interior = (index > 0) & (index < T // 2)
    return np.where(interior, p + fejer(tt + theta, T), p)


def counting_distribution(theta: float, T: int) -> np.ndarray:
    """Probabilities of ``theta_tilde = 0, 1/T, ..., 1/2`` (length ``T/2 + 1``)."""
    if not 0.0 <= theta <= 0.5:
        raise ValueError("theta must lie in [0, 1/2]")
    if T < 2 or T & (T - 1):
        raise ValueError("T must be a power of two >= 2")
    return outcome_likelihood(np.arange(T // 2 + 1), theta, T)


@lru_cache(maxsize=4096)
def _cdf(theta: float, T: int) -> np.ndarray:
    cdf = np.cumsum(counting_distribution(theta, T))
    cdf /= cdf[-1]
    cdf.setflags(write=False)
    return cdf


def sample_indices(theta: float, T: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of folded outcome indices."""
    cdf = _cdf(float(theta), int(T))
    return np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), T // 2)


def sample_outcome(theta: float, T: int, rng: np.random.Generator) -> CountingOutcome:
    return CountingOutcome(int(sample_indices(theta, T, 1, rng)[0]), T)


def error_bound(S, T, N=None):
    """Counting error bound ``2 pi sqrt(S) / T + pi**2 / T**2``.

    With ``N`` given, ``S`` is read as a count over ``N`` items and the bound is
    applied to the fraction ``S / N``, then rescaled to count units; that is
    the form in which the ``8 / pi**2`` success probability holds.
    """
    if N is None:
        return 2 * np.pi * np.sqrt(S) / T + np.pi ** 2 / T ** 2
    return N * error_bound(np.asarray(S) / N, T)


def error_bound_check(S_est, S, T, N=None) -> bool:
    return bool(abs(S_est - S) < error_bound(S, T, N))


# ------------------------------------------------------------------ statevector

def uniform_state(n: int) -> np.ndarray:
    N = 1 << n
    return np.full(N, 1.0 / np.sqrt(N), dtype=np.complex128)


def grover_iteration(state: np.ndarray, oracle: BooleanOracle) -> np.ndarray:
    """One application of ``(2|psi><psi| - I) O_f``; works row-wise on 2-D stacks."""
    flipped = np.where(oracle.marks, -state, state)
    return 2.0 * flipped.mean(axis=-1, keepdims=True) - flipped


def inverse_qft(amplitudes: np.ndarray, axis: int = 0) -> np.ndarray:
    """``|m> -> T**-0.5 sum_k exp(-2 pi i m k / T) |k>`` along ``axis``."""
    return np.fft.fft(amplitudes, axis=axis, norm="ortho")


def check_norm(state: np.ndarray, tol: float = 1e-9):
    norm = float(np.vdot(state, state).real)
    if abs(norm - 1.0) > tol:
        raise AssertionError(f"state norm drifted to {norm!r}")


def counting_circuit_state(oracle: BooleanOracle, t: int, check: bool = False) -> np.ndarray:
    """Final ``(T, N)`` statevector of the counting circuit before measurement.

    Row ``m`` is the counting register value; bit ``j`` of ``m`` controls
    ``G**(2**j)``, applied as ``2**j`` sequential iterations.
    """
    n = oracle.n
    if t < 1:
        raise ConfigError("t must be >= 1")
    if t + n > MAX_CIRCUIT_QUBITS:
        raise ConfigError(f"t + n = {t + n} qubits exceeds the statevector cap of {MAX_CIRCUIT_QUBITS}")
    T = 1 << t
    state = np.full((T, oracle.N), 1.0 / np.sqrt(T * oracle.N), dtype=np.complex128)
    rows = np.arange(T)
    for j in range(t):
        ctrl = (rows >> j) & 1 == 1
        block = state[ctrl]
        for _ in range(1 << j):
            block = grover_iteration(block, oracle)
        state[ctrl] = block
        if check:
            check_norm(state.ravel())
    state = inverse_qft(state, axis=0)
    if check:
        check_norm(state.ravel())
    return state


def counting_circuit_pmf(oracle: BooleanOracle, t: int) -> np.ndarray:
    """Exact probabilities of the raw counting-register readout ``m in [0, T)``."""
    state = counting_circuit_state(oracle, t)
    return np.sum(np.abs(state) ** 2, axis=1)


def fold_pmf(pmf: np.ndarray) -> np.ndarray:
    """Merge readouts ``m`` and ``T - m`` into the folded outcome ``min(m, T - m)``."""
    T = pmf.size
    folded = pmf[: T // 2 + 1].copy()
    folded[1: T // 2] += pmf[T - 1: T // 2: -1]
    return folded


def fold_index(m: int, T: int) -> int:
    return min(m, T - m)


def simulate_counting_circuit(oracle: BooleanOracle, cfg: CountingConfig,
                              rng: np.random.Generator) -> CountingOutcome:
    if oracle.n != cfg.n:
        raise ConfigError(f"oracle has n={oracle.n} qubits, config says n={cfg.n}")
    pmf = counting_circuit_pmf(oracle, cfg.t)
    m = int(rng.choice(cfg.T, p=pmf / pmf.sum()))
    return CountingOutcome(fold_index(m, cfg.T), cfg.T)
