"""Tensor factorizations computed facewise in the Fourier domain.

Each factorization applies the corresponding dense matrix routine to every
Fourier face and transforms the stitched factors back. For real tensors
only the first floor(n/2) + 1 faces are factored; the remaining faces are
their conjugates, so the spatial factors come out exactly real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (
    DefectiveFace,
    DimensionMismatch,
    NotAnEigentube,
    SingularFace,
)
from .tensors import Tensor3, identity, slice_normalize, tensor_tube_mul
from .tubes import FOURIER, Tube, is_conjugate_even

#: Relative window within which face eigenvalue magnitudes count as tied.
TIE_RTOL = 1e-12

#: Below this relative size a singular value counts as zero (null space gate).
NULL_RTOL = 1e-10

#: Facewise pivot gate for the LU factorization.
LU_PIVOT_RTOL = 1e-13


def _half(n, use_symmetry):
    """Number of leading Fourier faces that determine the rest."""
    return n // 2 + 1 if use_symmetry else n


def _mirror(stack, n):
    """Fill faces half..n-1 of a stack with conjugates of their partners."""
    for f in range(_half(n, True), n):
        stack[f] = np.conj(stack[n - f])
    return stack


def _alloc(n, rows, cols):
    return np.empty((n, rows, cols), dtype=np.complex128)


def _spatial(stack, real):
    return Tensor3.from_fourier_faces(stack, real=real)


def _phase_fix(v):
    """Rotate a vector so its largest entry is real positive; ties take the
    smallest index. Keeps stitched eigenvectors deterministic and lets
    conjugate faces produce conjugate vectors."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if pivot != 0:
        v = v * (np.conj(pivot) / abs(pivot))
    return v


def _maybe_real_tube(vals_hat):
    """Tube from Fourier entries, snapped to real when conjugate-even."""
    t = Tube(vals_hat, FOURIER)
    spat = t.spatial_values
    if is_conjugate_even(t, tol=1e-13):
        spat = spat.real
    return Tube(spat)


# ---------------------------------------------------------------------------
# t-QR


@dataclass
class TQrResult:
    """f-orthogonal Q and f-upper-triangular R with A = Q * R."""

    q: Tensor3
    r: Tensor3


def t_qr(a, mode="complete"):
    """QR factorization of every Fourier face.

    ``mode="complete"`` returns Q of shape l x l x n and R of shape
    l x p x n; ``mode="reduced"`` returns the economy factors used by
    subspace iteration. Faces are normalized so the diagonal of R is real
    nonnegative, which makes the factor pair unique and lets fixed-point
    iterations built on this routine become exactly stationary.
    """
    l, p, n = a.shape
    qcols = l if mode == "complete" else min(l, p)
    sym = a.is_real
    half = _half(n, sym)
    stack = a.fourier_faces()
    qs = _alloc(n, l, qcols)
    rs = _alloc(n, qcols, p)
    for f in range(half):
        qf, rf = np.linalg.qr(stack[f], mode=mode)
        k = min(qcols, p)
        d = np.diag(rf)[:k].copy()
        phase = np.ones(qcols, dtype=np.complex128)
        nz = np.abs(d) > 0
        phase[:k][nz] = d[nz] / np.abs(d[nz])
        qs[f] = qf * phase
        rs[f] = np.conj(phase)[:, None] * rf
    if sym:
        _mirror(qs, n)
        _mirror(rs, n)
    return TQrResult(_spatial(qs, sym), _spatial(rs, sym))


# ---------------------------------------------------------------------------
# t-LU with partial pivoting


@dataclass
class TLuResult:
    """Factors of P * A = L * U with facewise partial pivoting.

    ``perm`` holds one permutation index vector per Fourier face
    (row ``perm[f][i]`` of the face lands in position ``i``); ``p`` is the
    dense tensor whose Fourier faces are those permutation matrices.
    """

    p: Tensor3
    l: Tensor3
    u: Tensor3
    perm: list = field(repr=False)


def t_lu(a):
    """LU with partial pivoting on every Fourier face.

    Raises :class:`SingularFace` when a face pivot falls below
    ``LU_PIVOT_RTOL`` times the face norm.
    """
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    sym = a.is_real
    half = _half(n, sym)
    stack = a.fourier_faces()
    ps = _alloc(n, p, p)
    ls = _alloc(n, p, p)
    us = _alloc(n, p, p)
    perm = [None] * n
    for f in range(half):
        pm, lf, uf = sla.lu(stack[f])
        gate = LU_PIVOT_RTOL * max(1.0, float(np.linalg.norm(stack[f])))
        pivots = np.abs(np.diag(uf))
        if pivots.size and pivots.min() <= gate:
            raise SingularFace(f, f"pivot {pivots.min():.3e}")
        # scipy returns A = pm @ L @ U, so the permutation applied to A is pm^T
        ps[f] = pm.T
        ls[f], us[f] = lf, uf
        perm[f] = np.argmax(pm.T, axis=1)
    if sym:
        _mirror(ps, n)
        _mirror(ls, n)
        _mirror(us, n)
        for f in range(half, n):
            perm[f] = perm[n - f]
    return TLuResult(_spatial(ps, sym), _spatial(ls, sym), _spatial(us, sym), perm)


# ---------------------------------------------------------------------------
# t-Hessenberg


@dataclass
class THessResult:
    """f-unitary W and f-upper-Hessenberg H with H = W^H * A * W."""

    w: Tensor3
    h: Tensor3


def t_hess(a):
    """Reduce every Fourier face to upper Hessenberg form by a unitary
    similarity."""
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    sym = a.is_real
    half = _half(n, sym)
    stack = a.fourier_faces()
    ws = _alloc(n, p, p)
    hs = _alloc(n, p, p)
    for f in range(half):
        hf, wf = sla.hessenberg(stack[f], calc_q=True)
        ws[f], hs[f] = wf, hf
    if sym:
        _mirror(ws, n)
        _mirror(hs, n)
    return THessResult(_spatial(ws, sym), _spatial(hs, sym))


# ---------------------------------------------------------------------------
# t-SVD


@dataclass
class TSvdResult:
    """Singular tube decomposition A = U * S * V^H.

    ``singular_tubes`` are the diagonal tubes of S; ``singular_values``
    their Frobenius norms, nonincreasing.
    """

    u: Tensor3
    s: Tensor3
    v: Tensor3
    singular_tubes: list
    singular_values: np.ndarray


def t_svd(a):
    l, p, n = a.shape
    k = min(l, p)
    sym = a.is_real
    half = _half(n, sym)
    stack = a.fourier_faces()
    us = _alloc(n, l, l)
    ss = np.zeros((n, l, p), dtype=np.complex128)
    vs = _alloc(n, p, p)
    for f in range(half):
        uf, sf, vhf = np.linalg.svd(stack[f])
        us[f] = uf
        ss[f, :k, :k] = np.diag(sf)
        vs[f] = vhf.conj().T
    if sym:
        _mirror(us, n)
        _mirror(ss, n)
        _mirror(vs, n)
    s_tensor = _spatial(ss, sym)
    tubes = [_maybe_real_tube(ss[:, i, i]) for i in range(k)]
    sigma = np.array([t.norm() for t in tubes])
    return TSvdResult(_spatial(us, sym), s_tensor, _spatial(vs, sym), tubes, sigma)


# ---------------------------------------------------------------------------
# determinant and characteristic polynomial


def t_det(a):
    """Determinant tube: Fourier entry i is det of Fourier face i."""
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    stack = a.fourier_faces()
    n = a.n
    vals = np.empty(n, dtype=np.complex128)
    half = _half(n, a.is_real)
    for f in range(half):
        vals[f] = np.linalg.det(stack[f])
    for f in range(half, n):
        vals[f] = np.conj(vals[n - f])
    return _maybe_real_tube(vals)


def char_poly_eval(a, x):
    """Evaluate tdet(A - I * x) at the tube x."""
    return t_det(a - tensor_tube_mul(identity(a.p, a.n), x))


# ---------------------------------------------------------------------------
# spectrum


def _sort_face_eigs(vals):
    """Magnitude-descending order with a deterministic tie rule.

    Magnitudes within ``TIE_RTOL`` (relative to the face spectrum scale) of
    each other are ordered by descending real part, then descending
    imaginary part. The real-part comparison uses the same window, so a
    conjugate pair whose computed magnitudes differ by one ulp still orders
    consistently however the eigensolver happened to round.
    """
    vals = np.asarray(vals, dtype=np.complex128)
    if vals.size == 0:
        return vals
    win = TIE_RTOL * max(1.0, float(np.abs(vals).max()))

    def blocks(items, key):
        items = sorted(items, key=lambda z: -key(z))
        out, cur = [], [items[0]]
        for z in items[1:]:
            if key(cur[-1]) - key(z) <= win:
                cur.append(z)
            else:
                out.append(cur)
                cur = [z]
        out.append(cur)
        return out

    result = []
    for mag_block in blocks(list(vals), abs):
        for re_block in blocks(mag_block, lambda z: z.real):
            result.extend(sorted(re_block, key=lambda z: -z.imag))
    return np.array(result)


def _face_eigvals(m):
    scale = float(np.linalg.norm(m))
    if np.allclose(m, m.conj().T, rtol=0.0, atol=1e-13 * max(1.0, scale)):
        return np.linalg.eigvalsh(m).astype(np.complex128)
    return np.linalg.eigvals(m)


def facewise_sort_tubes(tubes):
    """Re-stitch a list of tubes so each Fourier face is magnitude sorted.

    This is the alignment convention for comparing computed eigentubes with
    a reference spectrum.
    """
    n = tubes[0].n
    mat = np.stack([t.fourier_values for t in tubes], axis=1)  # (n, k)
    for f in range(n):
        mat[f] = _sort_face_eigs(mat[f])
    return [_maybe_real_tube(mat[:, j]) for j in range(len(tubes))]


class EigentubeSpectrum:
    """All p eigentubes of a square tensor, facewise magnitude sorted.

    ``face_values[f, j]`` is the j-th largest eigenvalue of Fourier face f;
    eigentube j is the inverse transform of column j. Multiplicity queries
    are evaluated facewise and take the minimum over faces.
    """

    def __init__(self, eigentubes, face_values, faces):
        self.eigentubes = eigentubes
        self.face_values = face_values
        self._faces = faces

    @property
    def p(self):
        return self.face_values.shape[1]

    def spectral_radius(self):
        return max(t.norm() for t in self.eigentubes)

    def to_f_diagonal(self):
        return f_diagonal_of(self.eigentubes)

    def algebraic_f_multiplicity(self, j, rtol=1e-8):
        lam = self.face_values[:, j]
        counts = []
        for f in range(self.face_values.shape[0]):
            vals = self.face_values[f]
            scale = max(1.0, float(np.abs(vals).max()))
            counts.append(int(np.sum(np.abs(vals - lam[f]) <= rtol * scale)))
        return min(counts)

    def geometric_f_multiplicity(self, j, rtol=1e-8):
        lam = self.face_values[:, j]
        dims = []
        for f, m in enumerate(self._faces):
            shifted = m - lam[f] * np.eye(m.shape[0])
            s = np.linalg.svd(shifted, compute_uv=False)
            gate = rtol * max(1.0, float(s.max()) if s.size else 1.0)
            dims.append(int(np.sum(s <= gate)))
        return min(dims)

    def index_of(self, j, rtol=1e-8):
        """Smallest k at which the null space of (A - lambda * I)^k stops
        growing, taken facewise with the maximum over faces."""
        lam = self.face_values[:, j]
        worst = 1
        for f, m in enumerate(self._faces):
            p = m.shape[0]
            shifted = m - lam[f] * np.eye(p)
            prev = _nullity(shifted, rtol)
            k = 1
            power = shifted
            while k < p:
                power = power @ shifted
                cur = _nullity(power, rtol)
                if cur == prev:
                    break
                prev = cur
                k += 1
            worst = max(worst, k)
        return worst


def _nullity(m, rtol):
    s = np.linalg.svd(m, compute_uv=False)
    gate = rtol * max(1.0, float(s.max()) if s.size else 1.0)
    return int(np.sum(s <= gate))


def f_diagonal_of(tubes):
    from .tensors import f_diagonal

    return f_diagonal(tubes)


def spectrum_of(a):
    """Eigentubes of a square tensor via a dense eigensolver per face."""
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    stack = a.fourier_faces()
    raw = [None] * n
    half = _half(n, a.is_real)
    for f in range(half):
        raw[f] = _face_eigvals(stack[f])
    for f in range(half, n):
        raw[f] = np.conj(raw[n - f])
    face_values = np.stack([_sort_face_eigs(v) for v in raw])
    tubes = [_maybe_real_tube(face_values[:, j]) for j in range(p)]
    return EigentubeSpectrum(tubes, face_values, stack)


# ---------------------------------------------------------------------------
# eigenslices


def eigenslice_for(a, lam, gate=1e-8, defect_tol=1e-8):
    """Eigenslice for a given eigentube, stitched from facewise eigenvectors.

    On each face the nearest eigenvalue must match lambda's Fourier entry
    within ``gate`` (relative to the face spectrum), else
    :class:`NotAnEigentube`; when the shifted face has no small singular
    value the eigenvector is not recoverable and :class:`DefectiveFace` is
    raised. The result is normalized so its bilinear self-product is the
    unit tube.
    """
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    stack = a.fourier_faces()
    lam_hat = lam.fourier_values
    cols = np.empty((p, n), dtype=np.complex128)
    for f in range(n):
        m = stack[f]
        evals = np.linalg.eigvals(m)
        scale = max(1.0, float(np.abs(evals).max()))
        dist = float(np.min(np.abs(evals - lam_hat[f])))
        if dist > gate * scale:
            raise NotAnEigentube(f, dist)
        shifted = m - lam_hat[f] * np.eye(p)
        _, s, vh = np.linalg.svd(shifted)
        if s[-1] > defect_tol * max(1.0, float(np.linalg.norm(m))):
            raise DefectiveFace(f, float(s[-1]))
        cols[:, f] = _phase_fix(np.conj(vh[-1]))
    data = np.fft.ifft(cols, axis=1)
    if a.is_real and all(
        is_conjugate_even(Tube(cols[i], FOURIER), tol=1e-10) for i in range(p)
    ):
        data = data.real
    x, _ = slice_normalize(Tensor3(data[:, None, :]))
    return x


# ---------------------------------------------------------------------------
# real t-Schur


def real_t_schur(a):
    """Real Schur-type factorization Q * A * Q^H = R of a real tensor.

    Q is real f-orthogonal and every Fourier face of R is (quasi) upper
    triangular: the real faces get the real Schur form with possible 2 x 2
    diagonal bumps, the complex faces the complex Schur form.
    """
    if not a.is_real:
        raise ValueError("real_t_schur requires a real tensor")
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    stack = a.fourier_faces()
    qs = _alloc(n, p, p)
    rs = _alloc(n, p, p)

    def real_face(f):
        t, z = sla.schur(stack[f].real, output="real")
        qs[f] = z.T
        rs[f] = t

    real_face(0)
    for f in range(1, (n - 1) // 2 + 1):
        t, z = sla.schur(stack[f], output="complex")
        qs[f] = z.conj().T
        rs[f] = t
        qs[n - f] = np.conj(qs[f])
        rs[n - f] = np.conj(rs[f])
    if n % 2 == 0 and n > 1:
        real_face(n // 2)
    return _spatial(qs, True), _spatial(rs, True)


# ---------------------------------------------------------------------------
# null space, range, inverse


def t_null_basis(a, rtol=NULL_RTOL):
    """Basis slices of the null space, one per shared facewise null
    direction; the count is the minimum facewise nullity.

    Returns a (possibly empty) list of lateral slices X with A * X almost
    zero.
    """
    l, p, n = a.shape
    stack = a.fourier_faces()
    vhs = []
    nullities = []
    for f in range(n):
        _, s, vh = np.linalg.svd(stack[f])
        smax = float(s.max()) if s.size else 0.0
        gate = rtol * smax if smax > 0 else np.inf
        ncols = p - s.size + int(np.sum(s <= gate)) if s.size else p
        nullities.append(ncols)
        vhs.append(vh)
    r = min(nullities)
    basis = []
    for j in range(1, r + 1):
        cols = np.empty((p, n), dtype=np.complex128)
        for f in range(n):
            cols[:, f] = _phase_fix(np.conj(vhs[f][p - j]))
        data = np.fft.ifft(cols, axis=1)
        if a.is_real and all(
            is_conjugate_even(Tube(cols[i], FOURIER), tol=1e-10) for i in range(p)
        ):
            data = data.real
        basis.append(Tensor3(data[:, None, :]))
    return basis


def in_range(a, y, rtol=NULL_RTOL):
    """Whether the lateral slice y lies in the range of A, facewise."""
    if y.p != 1:
        raise DimensionMismatch("columns", y.p, 1)
    if a.l != y.l or a.n != y.n:
        raise DimensionMismatch("rows", (a.l, a.n), (y.l, y.n))
    stack = a.fourier_faces()
    ys = np.fft.fft(y.data[:, 0, :], axis=1)
    for f in range(a.n):
        u, s, _ = np.linalg.svd(stack[f])
        smax = float(s.max()) if s.size else 0.0
        rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
        ur = u[:, :rank]
        resid = ys[:, f] - ur @ (ur.conj().T @ ys[:, f])
        if np.linalg.norm(resid) > rtol * max(1.0, np.linalg.norm(ys[:, f])):
            return False
    return True


def t_inverse(a, rtol=1e-13):
    """Tensor inverse via facewise inversion; every Fourier face must be
    nonsingular."""
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)
    p, n = a.p, a.n
    stack = a.fourier_faces()
    out = _alloc(n, p, p)
    half = _half(n, a.is_real)
    for f in range(half):
        s = np.linalg.svd(stack[f], compute_uv=False)
        if s[-1] <= rtol * max(1.0, float(s[0])):
            raise SingularFace(f, f"sigma_min {s[-1]:.3e}")
        out[f] = np.linalg.inv(stack[f])
    if a.is_real:
        _mirror(out, n)
    return _spatial(out, a.is_real)
