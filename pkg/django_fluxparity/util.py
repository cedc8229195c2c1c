import math

from scipy import constants

TWO_PI = 2.0 * math.pi


def hz_to_angular(value_hz: float) -> float:
    return TWO_PI * value_hz


def angular_to_hz(value: float) -> float:
    return value / TWO_PI


def db_to_amplitude(value_db: float) -> float:
    """
    :param value_db: attenuation in decibels (power)
    :return: the corresponding amplitude ratio, 10^(-dB/20)
    """
    return 10.0 ** (-value_db / 20.0)


def wrap_phase(phase: float) -> float:
    """
    Map a phase onto [0, 2π).
    """
    wrapped = math.fmod(phase, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of values just below 0 can round up to exactly 2π
    return 0.0 if wrapped >= TWO_PI else wrapped


def boltzmann_factor(omega: float, temperature: float) -> float:
    """
    exp[-ħω/(k_B T)] for an angular frequency ω (rad/s) and a temperature in
    kelvin. Zero temperature yields exactly zero.
    """
    if temperature < 0.0:
        raise ValueError('Temperature must be non-negative, got %r' % temperature)
    if temperature == 0.0:
        return 0.0
    return math.exp(-constants.hbar * omega / (constants.k * temperature))
