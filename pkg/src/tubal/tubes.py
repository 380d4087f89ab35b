"""Tube arithmetic, the scalar ring of t-product tensor algebra.

A tube is an ordered fiber of n complex numbers. Under entrywise addition
and circular convolution the tubes of a fixed length form a commutative
ring whose identity is the unit tube (1, 0, ..., 0). Products and
quotients are evaluated entrywise in the Fourier domain. The forward DFT
is unnormalized and the inverse carries the 1/n factor, i.e. the numpy
``fft``/``ifft`` convention; every other module inherits this choice.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, DomainMismatch, NearSingularTube

SPATIAL = "spatial"
FOURIER = "fourier"

#: Relative floor below which a Fourier entry of a divisor is treated as zero.
SINGULARITY_EPS = 1e-13


class Tube:
    """Immutable length-n fiber tagged with its transform domain.

    The spatial representation is canonical: equality always compares
    spatial entries, whichever domain a tube was built in. Arithmetic is
    defined between spatial tubes of equal length; the Fourier image is
    computed on demand and cached.
    """

    __slots__ = ("_values", "_domain", "_fourier")

    def __init__(self, values, domain=SPATIAL):
        arr = np.array(values, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"tube values must be 1-d, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("a tube needs at least one entry")
        if domain not in (SPATIAL, FOURIER):
            raise ValueError(f"unknown tube domain {domain!r}")
        arr.setflags(write=False)
        self._values = arr
        self._domain = domain
        self._fourier = None

    @property
    def values(self):
        return self._values

    @property
    def domain(self):
        return self._domain

    @property
    def n(self):
        return self._values.size

    def __len__(self):
        return self._values.size

    @property
    def is_real(self):
        """True when the spatial entries carry no imaginary part."""
        return not np.any(self.spatial_values.imag)

    @property
    def spatial_values(self):
        if self._domain == SPATIAL:
            return self._values
        return np.fft.ifft(self._values)

    @property
    def fourier_values(self):
        if self._domain == FOURIER:
            return self._values
        if self._fourier is None:
            f = np.fft.fft(self._values)
            f.setflags(write=False)
            self._fourier = f
        return self._fourier

    def to_fourier(self):
        return tube_fft(self)

    def to_spatial(self):
        return tube_ifft(self) if self._domain == FOURIER else self

    def norm(self):
        return tube_norm(self)

    @property
    def H(self):
        return tube_conj_t(self)

    # The ring operators act on spatial tubes only; a tube living in the
    # Fourier domain must be transformed back explicitly first.

    def _compat(self, other):
        if self._domain != SPATIAL or other._domain != SPATIAL:
            raise DomainMismatch("tube arithmetic is defined on spatial tubes")
        if self.n != other.n:
            raise DimensionMismatch("tubes", self.n, other.n)

    def __add__(self, other):
        if not isinstance(other, Tube):
            return NotImplemented
        self._compat(other)
        return Tube(self._values + other._values)

    def __sub__(self, other):
        if not isinstance(other, Tube):
            return NotImplemented
        self._compat(other)
        return Tube(self._values - other._values)

    def __neg__(self):
        return Tube(-self._values, self._domain)

    def __mul__(self, other):
        if isinstance(other, Tube):
            return tube_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return Tube(self._values * other, self._domain)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Tube):
            return tube_div(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return Tube(self._values / other, self._domain)
        return NotImplemented

    def __pow__(self, k):
        return tube_pow(self, k)

    def __eq__(self, other):
        if not isinstance(other, Tube):
            return NotImplemented
        return self.n == other.n and bool(
            np.array_equal(self.spatial_values, other.spatial_values)
        )

    __hash__ = None

    def __repr__(self):
        return f"Tube({np.array2string(self._values, precision=4)}, domain={self._domain!r})"


def unit_tube(n):
    """The multiplicative identity: one in the first entry, zeros after."""
    v = np.zeros(n, dtype=np.complex128)
    v[0] = 1.0
    return Tube(v)


def zero_tube(n):
    return Tube(np.zeros(n, dtype=np.complex128))


def tube_fft(t):
    """Unnormalized forward DFT of a spatial tube."""
    if t.domain != SPATIAL:
        raise DomainMismatch("tube_fft expects a spatial tube")
    return Tube(np.fft.fft(t.values), FOURIER)


def tube_ifft(t):
    """Inverse DFT (scaled by 1/n) of a Fourier tube."""
    if t.domain != FOURIER:
        raise DomainMismatch("tube_ifft expects a Fourier tube")
    return Tube(np.fft.ifft(t.values), SPATIAL)


def tube_mul(a, b):
    """Tube product: circular convolution, evaluated entrywise in Fourier.

    Commutative, with the unit tube as identity. Real operands produce a
    real result through the half-spectrum transform.
    """
    a._compat(b)
    if a.is_real and b.is_real:
        vals = np.fft.irfft(
            np.fft.rfft(a.values.real) * np.fft.rfft(b.values.real), n=a.n
        )
        return Tube(vals)
    return Tube(np.fft.ifft(a.fourier_values * b.fourier_values))


def tube_div(a, b):
    """Tube quotient: entrywise division in the Fourier domain.

    Raises :class:`NearSingularTube` when any Fourier entry of ``b`` falls
    below ``SINGULARITY_EPS * max(1, max |b_hat|)``.
    """
    a._compat(b)
    bf = b.fourier_values
    mags = np.abs(bf)
    gate = SINGULARITY_EPS * max(1.0, mags.max())
    worst = int(np.argmin(mags))
    if mags[worst] <= gate:
        raise NearSingularTube(worst, float(mags[worst]), gate)
    vals = np.fft.ifft(a.fourier_values / bf)
    if a.is_real and b.is_real:
        vals = vals.real
    return Tube(vals)


def tube_pow(t, k):
    """Integer power under the tube product; negative powers invert first."""
    if not isinstance(k, (int, np.integer)):
        raise TypeError("tube powers must be integers")
    if t.domain != SPATIAL:
        raise DomainMismatch("tube_pow expects a spatial tube")
    if k == 0:
        return unit_tube(t.n)
    base = t if k > 0 else tube_div(unit_tube(t.n), t)
    vals = np.fft.ifft(base.fourier_values ** abs(k))
    if base.is_real:
        vals = vals.real
    return Tube(vals)


def tube_norm(t):
    """Frobenius norm of the spatial entries."""
    return float(np.linalg.norm(t.spatial_values))


def tube_conj_t(t):
    """Conjugate transpose of a tube: conjugate, then reverse entries 2..n."""
    v = t.spatial_values
    out = np.conj(np.concatenate([v[:1], v[:0:-1]]))
    return Tube(out)


def is_conjugate_even(t, tol=1e-10):
    """Whether a Fourier tube has the symmetry of a real signal's DFT.

    Entry 1 must be real and entry j must be the conjugate of entry
    n - j + 2, within ``tol`` scaled by the largest entry magnitude.
    """
    if t.domain != FOURIER:
        raise DomainMismatch("is_conjugate_even expects a Fourier tube")
    v = t.values
    n = v.size
    scale = max(1.0, float(np.abs(v).max()))
    if abs(v[0].imag) > tol * scale:
        return False
    for j in range(1, n):
        if abs(np.conj(v[j]) - v[(n - j) % n]) > tol * scale:
            return False
    return True
