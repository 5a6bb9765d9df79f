from fractions import Fraction

import numpy as np
import pytest


def random_skew_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return 0.5 * (Z - Z.conj().T)


def random_rational_poly(rng, degree: int):
    from gknextend.polynomials import Poly

    coeffs = [
        Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 5)))
        for _ in range(degree + 1)
    ]
    return Poly(coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
