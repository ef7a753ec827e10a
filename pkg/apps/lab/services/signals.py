# Libs
import numpy as np

# Apps
from apps.lab.entities import NoiseSpec, SignalSpec
from apps.series.entities import TimeSeries, as_series

# Global
from common.exceptions import InvalidConfig
from common.numerics import lab_setting
from constants import BIT_GENERATORS


def generate(spec: SignalSpec) -> TimeSeries:
    """Evaluate the terms of a signal at n = 1..N."""
    n = np.arange(1, spec.length + 1, dtype=float)
    values = np.zeros(spec.length)
    for term in spec.terms:
        part = term.amplitude * n**term.degree * np.exp(term.rate * n)
        if term.frequency > 0:
            part = part * np.sin(2 * np.pi * term.frequency * n + term.phase)
        values += part
    return TimeSeries(values)


def random_generator(seed: int) -> np.random.Generator:
    """Return a generator on the configured bit generator."""
    name = lab_setting("BIT_GENERATOR")
    if name not in BIT_GENERATORS:
        raise InvalidConfig(f"Unknown bit generator {name!r}.")
    return np.random.Generator(getattr(np.random, name)(seed))


def replicate_seed(base_seed: int, index: int) -> int:
    """Derive the 64-bit seed of replicate `index` from a base seed."""
    sequence = np.random.SeedSequence(base_seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def add_noise(series, noise: NoiseSpec) -> TimeSeries:
    """Add δ times standard normal variates drawn from the noise seed."""
    series = as_series(series)
    if noise.sigma == 0:
        return series
    draws = random_generator(noise.seed).standard_normal(series.length)
    return TimeSeries(series.values + noise.sigma * draws)
