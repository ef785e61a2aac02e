"""Far-field line-of-sight channels between radars and target-side arrays."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PathGain:
    """Complex path gain sqrt(ref_gain)/distance with phase -2*pi*distance/wavelength."""

    value: complex
    distance: float
    ref_gain: float
    wavelength: float


def path_gain(distance: float, alpha: float, wavelength: float) -> PathGain:
    """Path gain between two nodes; ``alpha`` is the linear power gain at 1 m."""
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    if alpha <= 0:
        raise ValueError(f"reference gain must be positive, got {alpha}")
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    value = np.sqrt(alpha) / distance * np.exp(-2j * np.pi * distance / wavelength)
    return PathGain(complex(value), distance, alpha, wavelength)


@dataclass(frozen=True, eq=False)
class LosChannel:
    """Rank-one LoS channel: gain times the outer product of array responses."""

    matrix: np.ndarray
    endpoints: tuple[str, str] = field(default=("rx", "tx"))


def los_channel(rx_response: np.ndarray, tx_response: np.ndarray, gain: PathGain,
                endpoints: tuple[str, str] = ("rx", "tx")) -> LosChannel:
    """Channel matrix gain * a_rx * a_tx^T (receive elements by transmit antennas).

    Reciprocity holds by construction: swapping the responses transposes the
    matrix entrywise exactly.
    """
    rx_response = np.asarray(rx_response)
    tx_response = np.asarray(tx_response)
    if rx_response.size == 0 or tx_response.size == 0:
        raise ValueError("array responses must be nonempty")
    # einsum keeps the elementwise products bitwise symmetric in the two
    # factors, so swapping them transposes the matrix exactly.
    outer = np.einsum("i,j->ij", rx_response, tx_response)
    return LosChannel(gain.value * outer, endpoints)
