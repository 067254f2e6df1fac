"""Shared helpers for the test suite."""

import numpy as np


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_traceless_hermitian(rng, n):
    h = random_hermitian(rng, n)
    return h - np.trace(h) / n * np.eye(n)


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
