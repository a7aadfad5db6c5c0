"""
Discrete memoryless noise channel between enrolled and query symbols.
"""
import numpy as np

from .exceptions import SchemeError
from .models import NoiseChannel
from .source_model import symbol_pmf


def _check_rate(name, value, upper=1.0):
    if not 0.0 <= value <= upper:
        raise SchemeError(f"{name} must lie in [0, {upper:g}], got {value}")


def binary_channel(eta0, eta1):
    """
    Binary channel W = [[1-eta0, eta0], [eta1, 1-eta1]].

    Args:
        eta0: probability that a 0 is read as 1
        eta1: probability that a 1 is read as 0
    """
    _check_rate('eta0', eta0)
    _check_rate('eta1', eta1)
    transition = np.array([[1.0 - eta0, eta0], [eta1, 1.0 - eta1]])
    return NoiseChannel(transition=transition, eta0=eta0, eta1=eta1)


def symmetric_channel(alphabet_size, eta0, eta1, eta2=0.0):
    """
    Channel over |X| symbols, symmetric w.r.t. symbol 0.

    W(s|0) = eta0 and W(0|s) = eta1 for every s != 0; a nonzero symbol turns
    into another nonzero symbol with probability eta2 each, and stays put with
    probability 1 - eta1 - (|X|-2) * eta2.
    """
    if alphabet_size < 2:
        raise SchemeError(f"alphabet_size must be >= 2, got {alphabet_size}")
    if alphabet_size == 2:
        if eta2:
            raise SchemeError("eta2 has no meaning for a binary alphabet")
        return binary_channel(eta0, eta1)

    _check_rate('eta0', eta0, 1.0 / (alphabet_size - 1))
    _check_rate('eta1', eta1)
    stay = 1.0 - eta1 - (alphabet_size - 2) * eta2
    if eta2 < 0.0 or stay < 0.0:
        raise SchemeError(f"eta1={eta1}, eta2={eta2} leave a negative self-transition probability")

    w = np.full((alphabet_size, alphabet_size), eta2)
    w[0, :] = eta0
    w[0, 0] = 1.0 - (alphabet_size - 1) * eta0
    w[1:, 0] = eta1
    w[np.arange(1, alphabet_size), np.arange(1, alphabet_size)] = stay
    return NoiseChannel(transition=w, eta0=eta0, eta1=eta1, eta2=eta2)


def noiseless_channel(alphabet_size=2):
    """Identity channel: Q = X."""
    return symmetric_channel(alphabet_size, 0.0, 0.0)


def query_marginal(model, chan):
    """
    P(Q = q) = sum_x P(X = x) W(q|x).

    Raises:
        SchemeError: if the channel and source alphabets differ
    """
    if model.alphabet_size != chan.alphabet_size:
        raise SchemeError(
            f"source alphabet ({model.alphabet_size}) and channel alphabet ({chan.alphabet_size}) differ"
        )
    return symbol_pmf(model) @ chan.transition


def apply_channel(sequences, chan, rng):
    """
    Pass every symbol of ``sequences`` through the channel independently.

    Returns:
        np.ndarray of query symbols with the same shape as ``sequences``
    """
    sequences = np.asarray(sequences, dtype=np.int64)
    cumulative = np.cumsum(chan.transition, axis=1)
    u = rng.random(sequences.shape)
    # Inverse-CDF sampling per source symbol
    noisy = (u[..., None] >= cumulative[sequences]).sum(axis=-1)
    return np.minimum(noisy, chan.alphabet_size - 1)
