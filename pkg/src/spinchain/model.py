"""Static model of an open Ising chain of spin-1/2 nuclei in a field gradient.

The chain Hamiltonian (diagonal part, frequency units, hbar = 1) is

    H0 = - sum_k omega_k I_k^z  -  2 J sum_k I_k^z I_{k+1}^z

with L spins, nearest-neighbour Ising coupling J over the L-1 bonds of an
open chain, and NMR frequencies ramped linearly along the chain,
omega_k = omega0 + k * delta_omega.  A basis state assigns one bit per
qubit: bit k = 0 means spin k points along the field (I^z eigenvalue +1/2),
bit k = 1 means spin down (-1/2).  Bitstrings render most-significant
qubit first, |b_{L-1} ... b_1 b_0>.

The gradient condition delta_omega > 4J keeps the single-spin transition
bands omega_k +/- 2J of distinct spins disjoint, so every rf frequency
addresses at most one spin.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ChainParams:
    """Chain geometry and field parameters, all frequencies in units of J.

    omega0 and delta_omega default to 100*J and 20*J: only detunings on the
    scale of J matter for the reduced two-level dynamics, but the exact
    propagator needs concrete Larmor frequencies.
    """

    L: int
    J: float = 1.0
    omega0: float | None = None
    delta_omega: float | None = None

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"need at least 2 qubits, got L={self.L}")
        if self.J <= 0:
            raise ValueError(f"Ising constant must be positive, got J={self.J}")
        if self.omega0 is None:
            object.__setattr__(self, "omega0", 100.0 * self.J)
        if self.delta_omega is None:
            object.__setattr__(self, "delta_omega", 20.0 * self.J)
        if self.delta_omega <= 0:
            raise ValueError(f"delta_omega must be positive, got {self.delta_omega}")
        if self.delta_omega <= 4 * self.J:
            raise ValueError(
                f"delta_omega={self.delta_omega} must exceed 4*J={4 * self.J} "
                "so that transition bands of distinct spins cannot overlap"
            )


@dataclass(frozen=True)
class BasisState:
    """Computational basis state of L spins, packed little-endian in `bits`.

    Bit k of `bits` is the state of qubit k (0 = up, 1 = down).
    """

    bits: int
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"need at least one qubit, got L={self.L}")
        if not 0 <= self.bits < (1 << self.L):
            raise ValueError(f"bits={self.bits} out of range for L={self.L}")

    @classmethod
    def from_string(cls, s: str) -> "BasisState":
        """Parse a |b_{L-1} ... b_0> bitstring, most-significant qubit first."""
        if not s or any(c not in "01" for c in s):
            raise ValueError(f"not a bitstring: {s!r}")
        return cls(bits=int(s, 2), L=len(s))

    @classmethod
    def ground(cls, L: int) -> "BasisState":
        return cls(bits=0, L=L)

    def bit(self, k: int) -> int:
        if not 0 <= k < self.L:
            raise IndexError(f"qubit {k} out of range for L={self.L}")
        return (self.bits >> k) & 1

    def flipped(self, k: int) -> "BasisState":
        if not 0 <= k < self.L:
            raise IndexError(f"qubit {k} out of range for L={self.L}")
        return BasisState(bits=self.bits ^ (1 << k), L=self.L)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.L}b")


def larmor_frequency(k: int, params: ChainParams) -> float:
    """NMR frequency of spin k on the linear ramp, omega0 + k*delta_omega."""
    if not 0 <= k < params.L:
        raise IndexError(f"qubit {k} out of range for L={params.L}")
    return params.omega0 + k * params.delta_omega


def _m(bit: int) -> float:
    """I^z eigenvalue for one bit: +1/2 for spin up (0), -1/2 for down (1)."""
    return 0.5 if bit == 0 else -0.5


def energy(state: BasisState, params: ChainParams) -> float:
    """Diagonal energy  E = -sum_k omega_k m_k - 2J sum_k m_k m_{k+1}.

    The Ising sum runs over the L-1 bonds of the open chain.
    """
    if state.L != params.L:
        raise ValueError(f"state has L={state.L}, params have L={params.L}")
    bits = state.bits
    e = 0.0
    for k in range(params.L):
        e -= larmor_frequency(k, params) * _m((bits >> k) & 1)
    for k in range(params.L - 1):
        e -= 2.0 * params.J * _m((bits >> k) & 1) * _m((bits >> (k + 1)) & 1)
    return e


def _signed_gap(bits: int, k: int, params: ChainParams) -> float:
    """E(bit k set) - E(bit k cleared) for the flip pair containing `bits`.

    Depends only on the neighbour bits of k, so O(1):
    gap = omega_k + 2J * (m_{k-1} + m_{k+1}), edge spins having one
    neighbour term.  Positive whenever omega_k > 2J, i.e. for any sane
    field configuration.
    """
    g = params.omega0 + k * params.delta_omega
    if k > 0:
        g += 2.0 * params.J * _m((bits >> (k - 1)) & 1)
    if k < params.L - 1:
        g += 2.0 * params.J * _m((bits >> (k + 1)) & 1)
    return g


def transition_frequency(state: BasisState, k: int, params: ChainParams) -> float:
    """Level spacing |E(state with bit k flipped) - E(state)| for spin k.

    Symmetric in the flip direction: both members of a flip pair report
    the same spacing.
    """
    if not 0 <= k < params.L:
        raise IndexError(f"qubit {k} out of range for L={params.L}")
    if state.L != params.L:
        raise ValueError(f"state has L={state.L}, params have L={params.L}")
    return abs(_signed_gap(state.bits, k, params))


def load_chain_params(path) -> ChainParams:
    """Read ChainParams from a key=value text file.

    Recognised keys: L, J, omega0, delta_omega.  Values are decimal numbers
    in units of J; '#' starts a comment; blank lines are skipped.
    """
    raw = parse_keyval_file(path)
    kwargs = {}
    for key, value in raw.items():
        if key == "L":
            kwargs["L"] = int(value)
        elif key in ("J", "omega0", "delta_omega"):
            kwargs[key] = float(value)
        else:
            raise ValueError(f"unknown chain parameter {key!r}")
    if "L" not in kwargs:
        raise ValueError(f"config {path} does not define L")
    return ChainParams(**kwargs)


def parse_keyval_file(path) -> dict[str, str]:
    """Parse a plain-text key=value file into a string dict."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out
