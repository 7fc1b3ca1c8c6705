"""Control-qubit states and polarization labels."""

import enum
from dataclasses import dataclass

from .errors import ContractError


class QdState(enum.Enum):
    """Pure states of the quantum-dot control qubit."""

    GROUND = "g"
    MINUS = "minus"


@dataclass(frozen=True)
class Mixture:
    """Incoherent mixture: |->  with probability ``alpha``, |g> otherwise."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ContractError(f"mixture probability alpha={self.alpha} outside [0, 1]")


class Pol(enum.Enum):
    """Photon polarization in the qubit basis, rotated 45 degrees from the cavity axis."""

    H = "H"
    V = "V"


@dataclass(frozen=True)
class PolarizationPair:
    input: Pol
    output: Pol

    @property
    def cross(self) -> bool:
        return self.input is not self.output

    @property
    def label(self) -> str:
        return self.input.value + self.output.value

    @classmethod
    def parse(cls, text: str) -> "PolarizationPair":
        """``"VH"``, ``"V->H"`` or ``"V,H"`` -> PolarizationPair(V, H)."""
        letters = text.upper().replace("->", "").replace(",", "").strip()
        if len(letters) != 2 or not set(letters) <= {"H", "V"}:
            raise ContractError(f"cannot parse polarization pair {text!r}")
        return cls(Pol(letters[0]), Pol(letters[1]))

    def __str__(self):
        return f"{self.input.value}->{self.output.value}"


CHANNELS = tuple(PolarizationPair(Pol(a), Pol(b)) for a, b in ("VV", "VH", "HV", "HH"))


def mixture_intensity(alpha, w_minus, w_ground):
    """Statistical mixture of the two conditional intensities.

    The QD state is a classical unknown, so the two outcomes add at the
    intensity level: ``alpha * w_minus + (1 - alpha) * w_ground``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError(f"alpha={alpha} outside [0, 1]")
    return alpha * w_minus + (1.0 - alpha) * w_ground
