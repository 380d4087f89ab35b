"""Iterative eigenpair solvers: power iteration, shifted inverse iteration,
deflation sweeps, subspace iteration, and the shifted QR algorithm, all
formulated over the t-product.

Every solver works on immutable tensors, accumulates an iteration-ordered
telemetry trace, and stops by the stabilization tests described with each
routine. Iteration caps raise :class:`NoConvergence` carrying the partial
result, so harnesses can still report it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (
    BadPairing,
    DimensionMismatch,
    DivisionFailure,
    NearSingularTube,
    NoConvergence,
    ShiftCollision,
    SingularShift,
    ZeroSlice,
)
from .factorizations import t_qr, t_hess
from .tensors import (
    Tensor3,
    concat_lateral,
    conj_transpose,
    f_tril,
    identity,
    slice_inner,
    slice_normalize,
    t_product,
    tensor_tube_div,
    tensor_tube_mul,
)
from .tubes import Tube, tube_conj_t, tube_div, tube_mul, unit_tube


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the iterative solvers.

    ``tol`` drives the stabilization tests, ``iter_max`` caps the outer
    iterations (the shifted QR runs are usually given a larger cap),
    ``power_index`` is the number of tensor products per subspace
    iteration step, and ``deflation_variant`` picks the pairing slice of
    the deflation sweep: the computed eigenslice (DE), the left eigenslice
    (DLE), or the orthonormalized Schur slice (DS).

    ``shift_recovery`` selects how the shifted inverse iteration maps the
    converged scaling tube back to an eigentube: ``"outside"`` computes
    e / alpha + shift, which is consistent with the spectrum of the
    inverted operator, while ``"inside"`` computes e / (alpha + shift),
    a variant that folds the shift into the scaling tube before inverting.
    """

    tol: float = 1e-15
    iter_max: int = 3000
    power_index: int = 1
    shift: Tube | None = None
    deflation_variant: str = "DE"
    rng_seed: int = 0
    shift_recovery: str = "outside"
    complex_shift: bool = False
    deflation_eps: float | None = None
    restarts: int = 3
    stagnation_limit: int = 500
    stall_window: int = 200
    stall_ceiling: float = 1e-8
    polish: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.iter_max < 1:
            raise ValueError("iter_max must be at least 1")
        if self.power_index < 1:
            raise ValueError("power_index must be at least 1")
        if self.deflation_variant.upper() not in ("DE", "DLE", "DS"):
            raise ValueError(f"unknown deflation variant {self.deflation_variant!r}")
        if self.shift_recovery not in ("outside", "inside"):
            raise ValueError(f"unknown shift recovery {self.shift_recovery!r}")


class _StallDetector:
    """Declares convergence when the stabilization metric stops improving.

    Iterations whose eigenvalue gap is small reach a floating point noise
    floor near eps / gap, well above any tight tolerance, so an iteration
    that fails to improve its best metric by ten percent for a whole window
    while already at a tiny level is treated as converged to the attainable
    fixed point.
    """

    def __init__(self, window, ceiling):
        self.window = window
        self.ceiling = ceiling
        self.best = np.inf
        self.stalled = 0

    def converged(self, metric):
        if metric < 0.9 * self.best:
            self.best = metric
            self.stalled = 0
            return False
        self.stalled += 1
        return self.stalled >= self.window and self.best <= self.ceiling


@dataclass
class EigenPair:
    """One computed eigenpair with convergence telemetry."""

    eigentube: Tube
    eigenslice: Tensor3
    residual_norm: float
    iterations: int
    converged: bool
    residual_trace: list = field(default_factory=list, repr=False)


@dataclass
class SchurResult:
    """Partial or full Schur-type output: f-unitary slices U and the
    compressed tensor R = U^H * A * U."""

    u: Tensor3
    r: Tensor3
    iterations: int
    converged: bool
    error_trace: list = field(default_factory=list, repr=False)
    residual_trace: list = field(default_factory=list, repr=False)

    def diag_tubes(self):
        return [Tube(self.r.data[j, j, :]) for j in range(self.r.p)]


def random_lateral_slice(l, n, real, rng):
    """Standard normal initial slice; complex entries get independent
    normal real and imaginary parts."""
    if real:
        return Tensor3(rng.standard_normal((l, 1, n)))
    data = rng.standard_normal((l, 1, n)) + 1j * rng.standard_normal((l, 1, n))
    return Tensor3(data)


def random_slice_set(l, m, n, real, rng):
    if real:
        return Tensor3(rng.standard_normal((l, m, n)))
    return Tensor3(
        rng.standard_normal((l, m, n)) + 1j * rng.standard_normal((l, m, n))
    )


def t_max(x):
    """The tube of largest Frobenius norm among the tubes of a lateral
    slice; ties take the smallest row index."""
    if x.p != 1:
        raise DimensionMismatch("columns", x.p, 1)
    norms = np.linalg.norm(x.data[:, 0, :], axis=1)
    if norms.max() == 0.0:
        raise ZeroSlice("every tube of the slice is zero")
    return Tube(x.data[int(np.argmax(norms)), 0, :])


def _anchored_scaling_row(w, anchor):
    """Row index of the scaling tube for a power step.

    Plain argmax of the row norms, except that a previously used anchor row
    is kept while its norm stays above a tenth of the maximum. Rows of the
    limiting eigenslice can trade the argmax back and forth (tube norms are
    not multiplicative), in which case a bare argmax alternates forever and
    the iterate sequence never settles even though its span converges; the
    hysteresis pins one representative without changing the fixed points,
    and still abandons a row whose component genuinely dies out.
    """
    norms = np.linalg.norm(w.data[:, 0, :], axis=1)
    top = norms.max()
    if top == 0.0:
        raise ZeroSlice("every tube of the slice is zero")
    cand = int(np.argmax(norms))
    if anchor is not None and norms[anchor] >= 0.1 * top:
        return anchor
    return cand


def _check_square(a):
    if a.l != a.p:
        raise DimensionMismatch("rows", a.l, a.p)


# ---------------------------------------------------------------------------
# power iteration


def t_power(a, v0=None, cfg=None, rng=None):
    """Power iteration for the eigenpair with the largest-norm eigentube.

    Each step applies the tensor and rescales by the largest-norm row tube,
    which pins that row to the unit tube; iteration stops once consecutive
    slices move by at most ``cfg.tol`` and consecutive scaling tubes by at
    most ``cfg.tol`` relative to their magnitude, or once the stall
    detector reports that the iteration sits at its floating point noise
    floor. A near-singular scaling tube triggers a restart with a fresh
    random slice, up to ``cfg.restarts`` times.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    v = v0 if v0 is not None else random_lateral_slice(a.p, a.n, a.is_real, rng)
    if v.p != 1 or v.l != a.p or v.n != a.n:
        raise DimensionMismatch("shape", v.shape, (a.p, 1, a.n))

    restarts = 0
    prev_alpha = None
    trace = []
    alpha = None
    resid = np.inf
    anchor = None
    stall = _StallDetector(cfg.stall_window, cfg.stall_ceiling)
    w = t_product(a, v)
    k = 0
    while k < cfg.iter_max:
        k += 1
        try:
            anchor = _anchored_scaling_row(w, anchor)
            alpha = Tube(w.data[anchor, 0, :])
            v_new = tensor_tube_div(w, alpha)
        except NearSingularTube as exc:
            if restarts >= cfg.restarts:
                raise DivisionFailure(
                    f"scaling tube stayed near singular after {restarts} restarts"
                ) from exc
            restarts += 1
            v = random_lateral_slice(a.p, a.n, a.is_real, rng)
            w = t_product(a, v)
            prev_alpha = None
            anchor = None
            continue
        w_new = t_product(a, v_new)
        resid = (w_new - tensor_tube_mul(v_new, alpha)).frob_norm()
        trace.append(resid)
        if prev_alpha is not None:
            dv = (v_new - v).frob_norm()
            da = (alpha - prev_alpha).norm()
            anorm = max(1.0, alpha.norm())
            if dv <= cfg.tol and da <= cfg.tol * anorm:
                return EigenPair(alpha, v_new, resid, k, True, trace)
            if stall.converged(max(dv / max(1.0, v_new.frob_norm()), da / anorm)):
                return EigenPair(alpha, v_new, resid, k, True, trace)
        v, w, prev_alpha = v_new, w_new, alpha
    partial = EigenPair(alpha, v, resid, k, False, trace)
    raise NoConvergence(k, resid, result=partial)


# ---------------------------------------------------------------------------
# shifted inverse power iteration


class _ShiftedSolver:
    """Facewise LU factorization of A - shift * I, factored once and
    reused for every inner solve."""

    def __init__(self, a, sigma):
        shifted = a - tensor_tube_mul(identity(a.p, a.n), sigma)
        self.real = shifted.is_real
        self.n = a.n
        stack = shifted.fourier_faces()
        self.factors = []
        for f in range(a.n):
            with warnings.catch_warnings():
                # singularity is detected by the pivot gate below
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu, piv = sla.lu_factor(stack[f])
            pivmags = np.abs(np.diag(lu))
            gate = 1e-13 * max(1.0, float(np.linalg.norm(stack[f])))
            if pivmags.min() <= gate:
                raise SingularShift(
                    f"face {f}: shifted tensor pivot {pivmags.min():.3e}"
                )
            self.factors.append((lu, piv))

    def solve(self, v):
        vh = np.fft.fft(v.data[:, 0, :], axis=1)
        out = np.empty_like(vh)
        for f in range(self.n):
            out[:, f] = sla.lu_solve(self.factors[f], vh[:, f])
        data = np.fft.ifft(out, axis=1)
        if self.real and v.is_real:
            data = data.real
        return Tensor3(data[:, None, :])


def t_inverse_power(a, sigma=None, v0=None, cfg=None, rng=None):
    """Shifted inverse iteration for the eigentube closest to ``sigma``.

    The shifted tensor is LU factored facewise once; each step solves for
    the next slice, rescales by its largest-norm tube, and stops by the
    same stabilization test as :func:`t_power`. The eigentube is recovered
    from the converged scaling tube according to ``cfg.shift_recovery``.
    ``sigma`` falls back to ``cfg.shift``.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    if sigma is None:
        sigma = cfg.shift
    if sigma is None:
        raise ValueError("pass a shift tube or set cfg.shift")
    if sigma.n != a.n:
        raise DimensionMismatch("tubes", sigma.n, a.n)
    solver = _ShiftedSolver(a, sigma)
    v = v0 if v0 is not None else random_lateral_slice(
        a.p, a.n, a.is_real and sigma.is_real, rng
    )
    e = unit_tube(a.n)
    prev_alpha = None
    trace = []
    lam = None
    resid = np.inf
    anchor = None
    stall = _StallDetector(cfg.stall_window, cfg.stall_ceiling)
    k = 0
    restarts = 0
    while k < cfg.iter_max:
        k += 1
        w = solver.solve(v)
        try:
            anchor = _anchored_scaling_row(w, anchor)
            alpha = Tube(w.data[anchor, 0, :])
            v_new = tensor_tube_div(w, alpha)
        except NearSingularTube as exc:
            if restarts >= cfg.restarts:
                raise DivisionFailure(
                    f"scaling tube stayed near singular after {restarts} restarts"
                ) from exc
            restarts += 1
            v = random_lateral_slice(a.p, a.n, a.is_real and sigma.is_real, rng)
            prev_alpha = None
            anchor = None
            continue
        if cfg.shift_recovery == "outside":
            lam = tube_div(e, alpha) + sigma
        else:
            lam = tube_div(e, alpha + sigma)
        resid = (
            t_product(a, v_new) - tensor_tube_mul(v_new, lam)
        ).frob_norm()
        trace.append(resid)
        if prev_alpha is not None:
            dv = (v_new - v).frob_norm()
            da = (alpha - prev_alpha).norm()
            anorm = max(1.0, alpha.norm())
            if dv <= cfg.tol and da <= cfg.tol * anorm:
                return EigenPair(lam, v_new, resid, k, True, trace)
            if stall.converged(max(dv / max(1.0, v_new.frob_norm()), da / anorm)):
                return EigenPair(lam, v_new, resid, k, True, trace)
        v, prev_alpha = v_new, alpha
    partial = EigenPair(lam, v, resid, k, False, trace)
    raise NoConvergence(k, resid, result=partial)


# ---------------------------------------------------------------------------
# deflation


def deflate(a, shift, u1, v, pairing_tol=1e-8, spectrum=None):
    """Rank-one deflation A - shift * U1 * V^H.

    ``v`` must pair with the eigenslice as V^H * U1 = e (checked at
    ``pairing_tol``, else :class:`BadPairing`). The deflated tensor keeps
    every eigentube except the one paired with ``u1``, which moves by
    ``-shift``. When the remaining ``spectrum`` tubes are supplied, a
    facewise collision of the moved eigentube with any of them raises
    :class:`ShiftCollision`.
    """
    _check_square(a)
    pairing = slice_inner(v, u1)
    dev = (pairing - unit_tube(a.n)).norm()
    if dev > pairing_tol:
        raise BadPairing(f"V^H * U1 deviates from e by {dev:.3e}")
    if spectrum is not None:
        lam1 = spectrum[0]
        moved = lam1 - shift
        for i, lam in enumerate(spectrum):
            gap = np.abs(lam.fourier_values - moved.fourier_values)
            scale = max(1.0, float(np.abs(lam.fourier_values).max()))
            if i > 0 and gap.min() <= 1e-12 * scale:
                raise ShiftCollision(
                    f"eigentube {i} meets the moved eigentube on a face"
                )
    outer = t_product(u1, conj_transpose(v))
    return a - tensor_tube_mul(outer, shift)


def _orthonormalize_against(z, basis):
    # two Gram-Schmidt passes keep the slices f-orthonormal to roundoff
    for _ in range(2):
        for q in basis:
            z = z - tensor_tube_mul(q, slice_inner(q, z))
    x, _ = slice_normalize(z)
    return x


def _triangular_eigen_slice(qtens, r, j):
    """Eigenslice from a Schur basis: solve the facewise triangular system
    (R - lambda_j I) c = 0 with c_j = 1 and combine the basis slices."""
    k, n = r.p, r.n
    rstack = r.fourier_faces()
    qstack = qtens.fourier_faces()
    cols = np.empty((qtens.l, n), dtype=np.complex128)
    for f in range(n):
        t = rstack[f]
        lam = t[j, j]
        c = np.zeros(k, dtype=np.complex128)
        c[j] = 1.0
        for i in range(j - 1, -1, -1):
            denom = t[i, i] - lam
            if abs(denom) <= 1e-12 * max(1.0, abs(t[i, i])):
                raise ShiftCollision(
                    f"face {f}: repeated diagonal entry blocks eigenslice recovery"
                )
            c[i] = -(t[i, i + 1 : j + 1] @ c[i + 1 : j + 1]) / denom
        cols[:, f] = qstack[f] @ c
    data = np.fft.ifft(cols, axis=1)
    x, _ = slice_normalize(Tensor3(data[:, None, :]))
    return x


def deflated_power_sweep(a, num, cfg=None):
    """Leading ``num`` eigenpairs by repeated power iteration plus
    deflation.

    After each converged stage the tensor is deflated by the full eigentube
    so the next-largest one dominates. The pairing slice follows
    ``cfg.deflation_variant``: the eigenslice itself (DE), the left
    eigenslice computed by a power iteration on the conjugate transpose
    (DLE), or the Schur slice obtained by orthonormalizing against the
    previous ones (DS). Reported eigenslices are mapped back to eigenslices
    of the original tensor: DE and DLE results are corrected stage by stage
    through the deflation relation, DS results come from the triangular
    compression over the accumulated Schur basis.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    if num < 1 or num > a.p:
        raise ValueError(f"num must be in 1..{a.p}, got {num}")
    variant = cfg.deflation_variant.upper()
    rng = np.random.default_rng(cfg.rng_seed)
    e = unit_tube(a.n)

    a_cur = a
    lambdas = []
    zs = []  # the slice used in each rank-one update
    vs = []  # the pairing slice of each update
    qs = []  # DS: accumulated Schur slices
    stage_stats = []
    for _ in range(num):
        pair = t_power(a_cur, cfg=cfg, rng=rng)
        lam = pair.eigentube
        z, _ = slice_normalize(pair.eigenslice)
        if variant == "DS":
            q = _orthonormalize_against(z, qs) if qs else z
            a_cur = a_cur - tensor_tube_mul(t_product(q, conj_transpose(q)), lam)
            qs.append(q)
        else:
            if variant == "DE":
                v = z
            else:
                left = t_power(conj_transpose(a_cur), cfg=cfg, rng=rng)
                w, _ = slice_normalize(left.eigenslice)
                pairing = slice_inner(w, z)
                try:
                    v = tensor_tube_mul(w, tube_conj_t(tube_div(e, pairing)))
                except NearSingularTube as exc:
                    raise BadPairing(
                        "left and right eigenslices are numerically orthogonal"
                    ) from exc
            a_cur = a_cur - tensor_tube_mul(t_product(z, conj_transpose(v)), lam)
            zs.append(z)
            vs.append(v)
        lambdas.append(lam)
        stage_stats.append((pair.iterations, pair.converged, pair.residual_trace))

    pairs = []
    if variant == "DS":
        qtens = concat_lateral(qs)
        r = t_product(t_product(conj_transpose(qtens), a), qtens)
        tubes = [Tube(r.data[j, j, :]) for j in range(num)]
        slices = [_triangular_eigen_slice(qtens, r, j) for j in range(num)]
    else:
        tubes = lambdas
        slices = []
        for m in range(num):
            y = zs[m]
            for j in range(m - 1, -1, -1):
                try:
                    gamma = tube_div(
                        tube_mul(lambdas[j], slice_inner(vs[j], y)),
                        lambdas[m] - lambdas[j],
                    )
                except NearSingularTube as exc:
                    raise ShiftCollision(
                        f"eigentubes {m} and {j} coincide on a face"
                    ) from exc
                y = y + tensor_tube_mul(zs[j], gamma)
            ynorm, _ = slice_normalize(y)
            slices.append(ynorm)
    for m in range(num):
        resid = (
            t_product(a, slices[m]) - tensor_tube_mul(slices[m], tubes[m])
        ).frob_norm()
        iters, ok, tr = stage_stats[m]
        pairs.append(EigenPair(tubes[m], slices[m], resid, iters, ok, tr))
    return pairs


# ---------------------------------------------------------------------------
# subspace iteration


def t_subspace_iteration(a, num=None, x0=None, cfg=None, rng=None):
    """Orthogonal subspace iteration for the ``num`` largest eigentubes.

    Each step applies the tensor ``cfg.power_index`` times, re-orthonormal-
    izes with an economy t-QR, and compresses R = X^H * A * X. Iteration
    stops once the f-lower-triangular part of R (diagonal included) moves
    by at most ``cfg.tol`` between steps, relative to the magnitude of R.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    if x0 is None:
        if num is None:
            raise ValueError("pass either num or x0")
        x = random_slice_set(a.p, num, a.n, a.is_real, rng)
    else:
        x = x0
        num = x.p
    r_prev = None
    err_trace = []
    resid_trace = []
    err = np.inf
    r = None
    stall = _StallDetector(cfg.stall_window, cfg.stall_ceiling)
    k = 0
    while k < cfg.iter_max:
        k += 1
        for _ in range(cfg.power_index):
            x = t_product(a, x)
        x = t_qr(x, mode="reduced").q
        r = t_product(t_product(conj_transpose(x), a), x)
        resid_trace.append((t_product(a, x) - t_product(x, r)).frob_norm())
        if r_prev is not None:
            scale = max(1.0, r.frob_norm())
            err = f_tril(r - r_prev).frob_norm()
            err_trace.append(err)
            if err <= cfg.tol * scale or stall.converged(err / scale):
                return SchurResult(x, r, k, True, err_trace, resid_trace)
        r_prev = r
    partial = SchurResult(x, r, k, False, err_trace, resid_trace)
    raise NoConvergence(k, err, result=partial)


# ---------------------------------------------------------------------------
# QR algorithms


@dataclass
class QrIterate:
    """One step of the basic QR iteration, kept when history is requested."""

    q: Tensor3
    r: Tensor3
    iterate: Tensor3
    q_acc: Tensor3
    r_acc: Tensor3


def t_qr_unshifted(a, cfg=None, keep_history=False):
    """Basic QR iteration: factor, remultiply in reverse order, repeat.

    Slow but transparent; every iterate is f-unitarily similar to the
    input, and the accumulated factors give a t-QR factorization of A^k.
    Stops when the strictly f-lower-triangular mass falls below
    ``cfg.tol * ||A||_F``.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    a_k = a
    q_acc = identity(a.p, a.n)
    r_acc = identity(a.p, a.n)
    history = []
    err_trace = []
    scale = a.frob_norm()
    err = np.inf
    k = 0
    while k < cfg.iter_max:
        k += 1
        qr = t_qr(a_k)
        a_k = t_product(qr.r, qr.q)
        q_acc = t_product(q_acc, qr.q)
        r_acc = t_product(qr.r, r_acc)
        if keep_history:
            history.append(QrIterate(qr.q, qr.r, a_k, q_acc, r_acc))
        err = f_tril(a_k, strict=True).frob_norm()
        err_trace.append(err)
        if err <= cfg.tol * max(1.0, scale):
            result = SchurResult(q_acc, a_k, k, True, err_trace, [])
            result.history = history
            return result
    partial = SchurResult(q_acc, a_k, k, False, err_trace, [])
    partial.history = history
    raise NoConvergence(k, err, result=partial)


def _givens(a, b):
    """Rotation (c real, s) with -conj(s) * a + c * b == 0 and c^2+|s|^2=1."""
    if b == 0:
        return 1.0, 0.0 + 0.0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    t = b / a
    c = 1.0 / np.sqrt(1.0 + abs(t) ** 2)
    return c, c * np.conj(t)


# widest complex dtype available for the final compression of a polished
# Schur pair; x86 long double where present, otherwise plain double
_WIDE = np.complex256 if hasattr(np, "complex256") else np.complex128


def _polish_schur_face(m, u, t, sweeps=4):
    """Iterative refinement of a computed Schur pair of one Fourier face.

    The QR iteration accumulates a backward error of roughly
    sqrt(iterations) * eps * ||M||, which for large-norm faces sits well
    above the representation floor. Each sweep recompresses against the
    original face, solves the triangular Sylvester equation for a strictly
    lower correction of the basis, and re-orthonormalizes by QR. The final
    compression runs in extended precision so the returned diagonal carries
    only representation-level error. The refined pair is kept only when it
    actually lowers the residual.
    """
    p = m.shape[0]
    scale = np.linalg.norm(m)

    def residual(uu, tt):
        return np.linalg.norm(m @ uu - uu @ tt)

    best_u, best_t = u, t
    best_res = residual(u, t)
    for _ in range(sweeps):
        h = u.conj().T @ m @ u
        tt = np.triu(h)
        x = np.zeros_like(h)
        ok = True
        for j in range(p):
            for i in range(p - 1, j, -1):
                den = tt[j, j] - tt[i, i]
                if abs(den) < 1e-6 * max(1.0, scale):
                    ok = False
                    continue
                num = h[i, j] + tt[i, i:] @ x[i:, j] - x[i, : i + 1] @ tt[: i + 1, j]
                x[i, j] = num / den
        if not ok and not np.any(x):
            break
        # QR keeps every leading column span of the corrected basis, so the
        # full Newton step takes effect (a polar factor would halve it)
        q, rr = np.linalg.qr(u @ (np.eye(p) + x))
        d = np.diag(rr)
        phase = np.where(np.abs(d) > 0, d / np.abs(np.where(d == 0, 1, d)), 1.0)
        u = q * phase
        mh = m.astype(_WIDE)
        uh = u.astype(_WIDE)
        t = np.triu((uh.conj().T @ mh @ uh).astype(np.complex128))
        res = residual(u, t)
        if res < best_res:
            best_u, best_t, best_res = u, t, res
        else:
            break
    return best_u, best_t


def _shifted_qr_sweep(h, u, r, sigma):
    """One explicit-shift QR step of the leading r x r block of a Hessenberg
    face, in place.

    Rows of the coupling block (columns beyond r) are carried through the
    left rotations; the accumulated unitary face ``u`` picks up the right
    rotations.
    """
    idx = np.arange(r)
    h[idx, idx] -= sigma
    rots = []
    for i in range(r - 1):
        c, s = _givens(h[i, i], h[i + 1, i])
        rots.append((c, s))
        top = c * h[i, i:] + s * h[i + 1, i:]
        bot = -np.conj(s) * h[i, i:] + c * h[i + 1, i:]
        h[i, i:] = top
        h[i + 1, i:] = bot
        h[i + 1, i] = 0.0
    for i, (c, s) in enumerate(rots):
        coli = c * h[:r, i] + np.conj(s) * h[:r, i + 1]
        colj = -s * h[:r, i] + c * h[:r, i + 1]
        h[:r, i] = coli
        h[:r, i + 1] = colj
        ucoli = c * u[:, i] + np.conj(s) * u[:, i + 1]
        ucolj = -s * u[:, i] + c * u[:, i + 1]
        u[:, i] = ucoli
        u[:, i + 1] = ucolj
    h[idx, idx] += sigma


def t_qr_shifted(a, cfg=None):
    """Shifted QR iteration on the f-Hessenberg form.

    The working tensor is first reduced to f-upper-Hessenberg form, then
    iterated facewise in the Fourier domain. Each sweep shifts every face
    by the trailing diagonal entry of the active leading block (multiplied
    by 1 + i in complex-shift mode), takes one Givens QR step of that
    block, and deflates its trailing row once the subdiagonal tube at the
    active corner drops below ``cfg.deflation_eps`` (default
    ``1e-14 * ||A||_F``). Restricting the step to the active block keeps
    converged subdiagonals from regrowing. If the active corner makes no
    progress for ``cfg.stagnation_limit`` sweeps the shift switches to the
    complex variant once, then the run is abandoned. On success the
    computed pair is polished facewise against the original tensor (see
    :func:`_polish_schur_face`) unless ``cfg.polish`` is false.
    """
    _check_square(a)
    cfg = cfg or SolverConfig()
    p, n = a.p, a.n
    eps = cfg.deflation_eps
    if eps is None:
        eps = 1e-14 * a.frob_norm()
    hess = t_hess(a)
    hs = hess.h.fourier_faces().copy()
    us = hess.w.fourier_faces().copy()
    a_faces = a.fourier_faces()
    complex_mode = cfg.complex_shift
    r = p
    stagnant = 0
    err_trace = []
    k = 0
    sqrt_n = np.sqrt(n)

    def finish(converged, iterations):
        nonlocal hs, us
        if converged and cfg.polish:
            for f in range(n):
                us[f], hs[f] = _polish_schur_face(a_faces[f], us[f], hs[f])
        snap = a.is_real and not complex_mode
        return SchurResult(
            Tensor3.from_fourier_faces(us, real=snap and _conj_even_stack(us)),
            Tensor3.from_fourier_faces(hs, real=snap and _conj_even_stack(hs)),
            iterations,
            converged,
            err_trace,
            [],
        )

    if p == 1:
        return finish(True, 0)
    while k < cfg.iter_max:
        k += 1
        for f in range(n):
            sigma = hs[f][r - 1, r - 1]
            if complex_mode:
                sigma = sigma * (1.0 + 1.0j)
            _shifted_qr_sweep(hs[f], us[f], r, sigma)
        sub = float(np.linalg.norm(hs[:, r - 1, r - 2])) / sqrt_n
        err_trace.append(sub)
        if sub <= eps:
            hs[:, r - 1, r - 2] = 0.0
            r -= 1
            stagnant = 0
            if r == 1:
                return finish(True, k)
        else:
            stagnant += 1
            if stagnant >= cfg.stagnation_limit:
                if not complex_mode:
                    complex_mode = True
                    stagnant = 0
                else:
                    raise NoConvergence(
                        k,
                        sub,
                        result=finish(False, k),
                        detail=f"stalled with {r} rows still active",
                    )
    raise NoConvergence(
        k,
        err_trace[-1] if err_trace else None,
        result=finish(False, k),
        detail=f"{r} rows still active",
    )


def _conj_even_stack(stack):
    """Whether a Fourier face stack is conjugate even to roundoff, i.e.
    the spatial tensor it came from is real."""
    n = stack.shape[0]
    scale = max(1.0, float(np.abs(stack).max()))
    for f in range(1, n // 2 + 1):
        if not np.allclose(
            stack[f], np.conj(stack[(n - f) % n]), rtol=0.0, atol=1e-10 * scale
        ):
            return False
    return np.abs(stack[0].imag).max() <= 1e-10 * scale
