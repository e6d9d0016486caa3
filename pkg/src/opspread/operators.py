"""Single-site operator constructions: clock/shift matrices, generalized
Paulis, coupling involutions, and Haar-random unitaries."""

import numpy as np

from .errors import InvalidDimensionError

__all__ = [
    "build_clock_shift",
    "generalized_pauli",
    "pauli_labels",
    "coupling_involution",
    "sample_haar_unitary",
]


def build_clock_shift(q):
    """Return the shift and clock matrices (X, Z) of dimension q.

    Z = diag(1, w, ..., w^(q-1)) with w = exp(2*pi*i/q), and X cyclically
    shifts the computational basis, X|j> = |j+1 mod q>.  They satisfy
    X^q = Z^q = 1 and Z X = w X Z.
    """
    if int(q) != q or q < 2:
        raise InvalidDimensionError(f"local dimension must be an integer >= 2, got {q}")
    q = int(q)
    omega = np.exp(2j * np.pi / q)
    Z = np.diag(omega ** np.arange(q))
    X = np.zeros((q, q), dtype=complex)
    X[(np.arange(q) + 1) % q, np.arange(q)] = 1.0
    return X, Z


def generalized_pauli(q, a, b):
    """Return sigma^(a,b) = X^a Z^b for the dimension-q clock/shift pair."""
    X, Z = build_clock_shift(q)
    return np.linalg.matrix_power(X, a % q) @ np.linalg.matrix_power(Z, b % q)


def pauli_labels(q, include_identity=False):
    """Labels (a, b) of the generalized Pauli basis, identity optionally first."""
    labels = [(a, b) for a in range(q) for b in range(q)]
    if not include_identity:
        labels.remove((0, 0))
    return labels


def coupling_involution(q):
    """Hermitian unitary coupling operator: diag(+1 x ceil(q/2), -1 x floor(q/2)).

    For even q this is traceless and reproduces the qubit coupling algebra
    exactly (the two-site gate is cos(e) - i sin(e) Z x Z); for odd q the
    trace is 1/q and the universal even-q coefficients acquire corrections.
    """
    if int(q) != q or q < 2:
        raise InvalidDimensionError(f"local dimension must be an integer >= 2, got {q}")
    q = int(q)
    labels = np.ones(q)
    labels[(q + 1) // 2:] = -1.0
    return labels


def sample_haar_unitary(q, rng):
    """Draw a q x q unitary from the Haar measure.

    Fills a matrix with independent standard complex Gaussians, QR-factorizes,
    and multiplies each column by the phase that makes the diagonal of R
    real-positive.  Without the phase fix the distribution is not Haar.
    """
    if int(q) != q or q < 2:
        raise InvalidDimensionError(f"local dimension must be an integer >= 2, got {q}")
    q = int(q)
    z = (rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))) / np.sqrt(2.0)
    qmat, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return qmat * (d / np.abs(d))


def sample_haar_batch(q, n, rng):
    """Draw n Haar unitaries at once, returned as an (n, q, q) array."""
    z = (rng.standard_normal((n, q, q)) + 1j * rng.standard_normal((n, q, q))) / np.sqrt(2.0)
    qmat, r = np.linalg.qr(z)
    d = np.einsum("nii->ni", r)
    return qmat * (d / np.abs(d))[:, None, :]
