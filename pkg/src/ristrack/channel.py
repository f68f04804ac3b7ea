"""Free-space cascaded channel and the effective reflected channel.

Each element m sees a transmitter at distance dh_m and the receiver at
distance dg_m. Its cascaded coefficient is the product of the two
free-space legs,

    casc_m = [c / (4 pi f dh_m)] e^{j 2 pi dh_m / lam}
           * [c / (4 pi f dg_m)] e^{j 2 pi dg_m / lam},

and the effective channel under a surface configuration is the gain
weighted coherent sum sqrt(Gt Gr) * sum_m casc_m * A_m e^{j phi_m}
with (A_m, phi_m) the realized per-element amplitude and phase. No
direct transmitter-receiver path is modeled.
"""

import numpy as np
from dataclasses import dataclass

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class CarrierSpec:
    """Carrier frequency and wavelength (derived when not given)."""

    frequency: float = 5.53e9
    wavelength: float = None
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        if self.wavelength is None:
            object.__setattr__(self, "wavelength", self.speed_of_light / self.frequency)
        rel = abs(self.wavelength * self.frequency - self.speed_of_light) / self.speed_of_light
        if rel > 1e-6:
            raise ValueError("wavelength and frequency are inconsistent")


@dataclass(frozen=True)
class AntennaGains:
    """Transmit and receive antenna gains in dBi."""

    tx_gain_dbi: float = 16.89
    rx_gain_dbi: float = 16.89

    def amplitude_factor(self):
        """sqrt(Gt * Gr) with gains converted from dBi to linear power."""
        gt = 10.0 ** (self.tx_gain_dbi / 10.0)
        gr = 10.0 ** (self.rx_gain_dbi / 10.0)
        return np.sqrt(gt) * np.sqrt(gr)


@dataclass
class ChannelVector:
    """Per-element complex cascaded coefficients."""

    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)

    @property
    def element_count(self):
        return self.coefficients.shape[0]


@dataclass(frozen=True)
class EffectiveChannel:
    """A complex effective channel value and its magnitude in dB."""

    value: complex
    magnitude_db: float

    @classmethod
    def from_value(cls, value):
        return cls(complex(value), magnitude_db(value))


def magnitude_db(value):
    """20 log10 |value|; zero maps to -inf."""
    m = np.abs(value)
    if m == 0:
        return -np.inf
    return float(20.0 * np.log10(m))


def cascaded_channel(geom, tx, rx, carrier=None):
    """Cascaded coefficients for every element of a geometry.

    ``tx`` and ``rx`` are PolarPoints. Swapping them gives the same
    vector because the two legs enter symmetrically.
    """
    from .geometry import element_distances, polar_to_cartesian

    if carrier is None:
        carrier = CarrierSpec()
    dh = element_distances(geom, polar_to_cartesian(tx))
    dg = element_distances(geom, polar_to_cartesian(rx))
    leg = carrier.speed_of_light / (4.0 * np.pi * carrier.frequency)
    amp = leg * leg / (dh * dg)
    phase = (2.0 * np.pi / carrier.wavelength) * (dh + dg)
    return ChannelVector(amp * np.exp(1j * phase))


def effective_channel(chan, config, gains=None):
    """Effective channel of a configuration against a cascaded channel.

    ``config`` is anything exposing reflection_coefficients() of the
    same length (see optimizer.RisConfig); the all-off surface has unit
    coefficients everywhere and acts as a plain reflective plate.
    """
    if gains is None:
        gains = AntennaGains()
    coeffs = config.reflection_coefficients()
    if len(coeffs) != chan.element_count:
        raise ValueError("configuration length does not match channel vector")
    value = gains.amplitude_factor() * np.sum(chan.coefficients * coeffs)
    return EffectiveChannel.from_value(value)
