import cmath

import numpy as np
import pytest

from tubal import Tensor3


def dft_oracle(values):
    """Explicit O(n^2) unnormalized forward DFT, independent of any fft."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        for j in range(n):
            out[k] += values[j] * cmath.exp(-2j * cmath.pi * j * k / n)
    return out


def circ_conv_oracle(a, b):
    """Brute-force circular convolution over all index shifts."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        for j in range(n):
            out[k] += a[j] * b[(k - j) % n]
    return out


def random_tensor(rng, l, p, n, real=False):
    if real:
        return Tensor3(rng.standard_normal((l, p, n)))
    return Tensor3(rng.standard_normal((l, p, n)) + 1j * rng.standard_normal((l, p, n)))


def tridiag_tensor(p=10, n=3):
    """Square tensor with faces 10^(i-1) * tridiag(-1, 2, -1)."""
    t = 2 * np.eye(p) - np.eye(p, k=1) - np.eye(p, k=-1)
    data = np.zeros((p, p, n))
    for i in range(n):
        data[:, :, i] = (10.0**i) * t
    return Tensor3(data)


def f_hermitian_tensor(rng, p, n, real=True):
    """(G + G^H) / 2; Fourier faces are Hermitian. With real G the faces are
    also conjugate-even across the tube index, which is what makes the
    eigentubes real in the spatial sense."""
    g = random_tensor(rng, p, p, n, real=real)
    from tubal import conj_transpose

    return Tensor3((g.data + conj_transpose(g).data) / 2)


def match_multisets(left, right, tol):
    """Greedy nearest matching of two complex multisets; asserts every
    pairing lies within tol."""
    left = list(left)
    right = list(right)
    assert len(left) == len(right)
    for z in left:
        dists = [abs(z - w) for w in right]
        k = int(np.argmin(dists))
        assert dists[k] <= tol, f"{z} unmatched, nearest {right[k]} at {dists[k]:.3e}"
        right.pop(k)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
