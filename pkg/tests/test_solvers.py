import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import f_hermitian_tensor, random_tensor, tridiag_tensor
from tubal import (
    BadPairing,
    DimensionMismatch,
    NoConvergence,
    SingularShift,
    SolverConfig,
    Tensor3,
    Tube,
    ZeroSlice,
    canonical_slice,
    concat_lateral,
    conj_transpose,
    deflate,
    deflated_power_sweep,
    eigenslice_for,
    f_diagonal,
    identity,
    slice_inner,
    spectrum_of,
    t_inverse_power,
    t_max,
    t_power,
    t_product,
    t_qr_shifted,
    t_qr_unshifted,
    t_subspace_iteration,
    tensor_tube_mul,
    unit_tube,
    zeros,
)


def spectral_distance(tubes, exact):
    return np.sqrt(sum((x - y).norm() ** 2 for x, y in zip(tubes, exact)))


def well_separated_f_diagonal(rng, p, n, base=3.0, ratio=0.5):
    """f-diagonal tensor whose eigentubes have constant facewise magnitude
    and geometrically decreasing norms; the spectrum is unambiguous."""
    tubes = []
    for j in range(p):
        theta = rng.uniform(-np.pi, np.pi, n)
        theta[0] = 0.0
        for f in range(1, n // 2 + 1):
            theta[(n - f) % n] = -theta[f]
        if n % 2 == 0:
            theta[n // 2] = 0.0
        vals = base * ratio**j * np.exp(1j * theta)
        tubes.append(Tube(np.fft.ifft(vals).real))
    return f_diagonal(tubes), tubes


# ---------------------------------------------------------------------------
# t_max


def test_t_max_canonical():
    assert t_max(canonical_slice(3, 0, 4)) == unit_tube(4)


def test_t_max_tie_takes_first():
    data = np.zeros((3, 1, 2))
    data[0, 0, :] = [1.0, 0.0]
    data[1, 0, :] = [5.0, 0.0]
    data[2, 0, :] = [0.0, 5.0]
    got = t_max(Tensor3(data))
    assert_allclose(got.spatial_values, [5.0, 0.0])


def test_t_max_matches_linear_scan(rng):
    x = random_tensor(rng, 6, 1, 4)
    norms = [np.linalg.norm(x.data[i, 0, :]) for i in range(6)]
    assert_allclose(
        t_max(x).spatial_values, x.data[int(np.argmax(norms)), 0, :]
    )


def test_t_max_zero_slice():
    with pytest.raises(ZeroSlice):
        t_max(zeros(3, 1, 2))


# ---------------------------------------------------------------------------
# power iteration


def test_power_identity_converges_immediately():
    pair = t_power(identity(3, 4), v0=canonical_slice(3, 0, 4))
    assert pair.converged and pair.iterations <= 3
    assert (pair.eigentube - unit_tube(4)).norm() <= 1e-14
    assert pair.residual_norm <= 1e-14


def test_power_f_diagonal_recovers_largest(rng):
    a, tubes = well_separated_f_diagonal(rng, 4, 3)
    pair = t_power(a, cfg=SolverConfig(rng_seed=3))
    assert pair.converged
    exact = spectrum_of(a).eigentubes[0]
    assert (pair.eigentube - exact).norm() <= 1e-12
    assert pair.residual_norm <= 1e-12


def test_power_scaled_tridiag():
    a = tridiag_tensor()
    pair = t_power(a, cfg=SolverConfig(rng_seed=0))
    assert pair.converged and pair.iterations <= 3000
    exact = spectrum_of(a).eigentubes[0]
    assert (pair.eigentube - exact).norm() <= 1e-12
    assert pair.residual_norm <= 1e-12
    assert len(pair.residual_trace) == pair.iterations


def test_power_facewise_equivalence(rng):
    # the converged eigentube faces match the per-face dominant eigenvalues
    a, _ = well_separated_f_diagonal(rng, 4, 3)
    pair = t_power(a, cfg=SolverConfig(rng_seed=5))
    lam = pair.eigentube.fourier_values
    for f, face in enumerate(a.fourier_faces()):
        ev = np.linalg.eigvals(face)
        top = ev[np.argmax(np.abs(ev))]
        assert abs(lam[f] - top) <= 1e-8 * max(1.0, abs(top))


def test_power_scale_equivariance(rng):
    a, _ = well_separated_f_diagonal(rng, 3, 2)
    p1 = t_power(a, cfg=SolverConfig(rng_seed=2))
    p2 = t_power(2.5 * a, cfg=SolverConfig(rng_seed=2))
    assert (p2.eigentube - 2.5 * p1.eigentube).norm() <= 1e-10
    # eigenslice spans agree: projectors onto the slices coincide facewise
    for f in range(2):
        u1 = np.fft.fft(p1.eigenslice.data[:, 0, :], axis=1)[:, f]
        u2 = np.fft.fft(p2.eigenslice.data[:, 0, :], axis=1)[:, f]
        u1 = u1 / np.linalg.norm(u1)
        u2 = u2 / np.linalg.norm(u2)
        proj_gap = np.linalg.norm(np.outer(u1, u1.conj()) - np.outer(u2, u2.conj()))
        assert proj_gap <= 1e-8


def test_power_shift_covariance(rng):
    a, _ = well_separated_f_diagonal(rng, 3, 2)
    sigma = Tube([0.5, 0.1])
    shifted = a + tensor_tube_mul(identity(3, 2), sigma)
    lam_a = spectrum_of(a).eigentubes
    lam_s = spectrum_of(shifted).eigentubes
    from tubal import facewise_sort_tubes

    want = facewise_sort_tubes([t + sigma for t in lam_a])
    for x, y in zip(facewise_sort_tubes(lam_s), want):
        assert (x - y).norm() <= 1e-8


def test_power_no_convergence_carries_partial():
    a = tridiag_tensor()
    with pytest.raises(NoConvergence) as info:
        t_power(a, cfg=SolverConfig(rng_seed=0, iter_max=5))
    partial = info.value.result
    assert partial is not None and not partial.converged
    assert partial.iterations == 5


def test_power_rejects_bad_slice_shape(rng):
    a = tridiag_tensor()
    with pytest.raises(DimensionMismatch):
        t_power(a, v0=random_tensor(rng, 3, 1, 3))


# ---------------------------------------------------------------------------
# shifted inverse iteration


def test_inverse_power_identity_with_shift():
    cfg = SolverConfig(rng_seed=1)
    pair = t_inverse_power(identity(3, 2), 0.5 * unit_tube(2), cfg=cfg)
    assert pair.converged
    assert (pair.eigentube - unit_tube(2)).norm() <= 1e-10


def test_inverse_power_targets_nearest(rng):
    a, tubes = well_separated_f_diagonal(rng, 4, 3)
    exact = spectrum_of(a).eigentubes
    target = exact[2]
    # offset through the unit tube so every Fourier face moves off the spectrum
    sigma = target + 0.05 * unit_tube(3)
    pair = t_inverse_power(a, sigma, cfg=SolverConfig(rng_seed=4))
    assert pair.converged
    assert (pair.eigentube - target).norm() <= 1e-10


def test_inverse_power_smallest_of_tridiag():
    a = tridiag_tensor()
    sigma = Tube([1e-5, 0.0, 0.0])
    pair = t_inverse_power(a, sigma, cfg=SolverConfig(rng_seed=0))
    assert pair.converged and pair.iterations <= 200
    exact = spectrum_of(a).eigentubes[-1]
    assert (pair.eigentube - exact).norm() <= 1e-12
    assert pair.residual_norm <= 1e-12


def test_inverse_power_recovery_conventions():
    a = tridiag_tensor()
    sigma = Tube([1e-5, 0.0, 0.0])
    outside = t_inverse_power(a, sigma, cfg=SolverConfig(rng_seed=0))
    inside = t_inverse_power(
        a, sigma, cfg=SolverConfig(rng_seed=0, shift_recovery="inside")
    )
    # with a tiny shift the two recoveries differ by about the shift size
    gap = (outside.eigentube - inside.eigentube).norm()
    assert 1e-7 <= gap <= 1e-3


def test_inverse_power_singular_shift(rng):
    a, tubes = well_separated_f_diagonal(rng, 3, 2)
    with pytest.raises(SingularShift):
        t_inverse_power(a, tubes[0], cfg=SolverConfig(rng_seed=0))


# ---------------------------------------------------------------------------
# deflation


def test_deflate_moves_largest_to_zero(rng):
    a = f_hermitian_tensor(rng, 4, 3)
    spec = spectrum_of(a)
    lam1 = spec.eigentubes[0]
    u1 = eigenslice_for(a, lam1)
    deflated = deflate(a, lam1, u1, u1)
    new = spectrum_of(deflated).eigentubes
    # the moved eigentube is zero, the rest survive
    assert min(t.norm() for t in new) <= 1e-8 * max(1.0, lam1.norm())
    for lam in spec.eigentubes[1:]:
        assert min((lam - t).norm() for t in new) <= 1e-8 * max(1.0, lam.norm())


def test_deflate_n1_is_classical_wielandt(rng):
    m = rng.standard_normal((4, 4))
    m = (m + m.T) / 2
    a = Tensor3(m[:, :, None])
    spec = spectrum_of(a)
    lam1 = spec.eigentubes[0]
    u1 = eigenslice_for(a, lam1)
    deflated = deflate(a, lam1, u1, u1)
    # classical Wielandt deflation computed directly with numpy
    w, v = np.linalg.eigh(m)
    i = int(np.argmax(np.abs(w)))
    x = v[:, i : i + 1]
    b = m - w[i] * (x @ x.T)
    assert_allclose(deflated.face(0).real, b, atol=1e-8)


def test_deflate_spectrum_law_random_diagonalizable(rng):
    d, tubes = well_separated_f_diagonal(rng, 4, 3)
    x = Tensor3(identity(4, 3).data + 0.2 * rng.standard_normal((4, 4, 3)))
    from tubal import t_inverse

    a = t_product(t_product(x, d), t_inverse(x))
    spec = spectrum_of(a)
    lam1 = spec.eigentubes[0]
    u1 = eigenslice_for(a, lam1)
    sigma = Tube([0.7, 0.1, -0.2])
    # pair with the scaled eigenslice itself
    pairing = slice_inner(u1, u1)
    from tubal import tube_conj_t, tube_div

    v = tensor_tube_mul(u1, tube_conj_t(tube_div(unit_tube(3), pairing)))
    deflated = deflate(a, sigma, u1, v)
    new = spectrum_of(deflated).eigentubes
    moved = lam1 - sigma
    assert min((moved - t).norm() for t in new) <= 1e-8 * max(1.0, moved.norm())
    for lam in spec.eigentubes[1:]:
        assert min((lam - t).norm() for t in new) <= 1e-8 * max(1.0, lam.norm())


def test_deflate_shift_collision(rng):
    a = f_hermitian_tensor(rng, 3, 2)
    spec = spectrum_of(a).eigentubes
    u1 = eigenslice_for(a, spec[0])
    # a shift equal to the gap between the first two eigentubes moves the
    # first one exactly onto the second
    from tubal import ShiftCollision

    with pytest.raises(ShiftCollision):
        deflate(a, spec[0] - spec[1], u1, u1, spectrum=spec)


def test_inverse_power_uses_config_shift():
    a = tridiag_tensor()
    cfg = SolverConfig(rng_seed=0, shift=Tube([1e-5, 0.0, 0.0]))
    pair = t_inverse_power(a, cfg=cfg)
    assert pair.converged
    with pytest.raises(ValueError):
        t_inverse_power(a)


def test_deflate_bad_pairing(rng):
    a = f_hermitian_tensor(rng, 3, 2)
    lam1 = spectrum_of(a).eigentubes[0]
    u1 = eigenslice_for(a, lam1)
    with pytest.raises(BadPairing):
        deflate(a, lam1, u1, 3.0 * u1)


def test_sweep_k1_matches_power(rng):
    a = tridiag_tensor()
    pair = t_power(a, cfg=SolverConfig(rng_seed=0))
    sweep = deflated_power_sweep(a, 1, cfg=SolverConfig(rng_seed=0))
    assert len(sweep) == 1
    assert (sweep[0].eigentube - pair.eigentube).norm() <= 1e-10


@pytest.mark.parametrize("variant", ["DE", "DLE", "DS"])
def test_sweep_full_spectrum_f_hermitian(rng, variant):
    a = f_hermitian_tensor(rng, 4, 2)
    exact = spectrum_of(a).eigentubes
    cfg = SolverConfig(rng_seed=1, deflation_variant=variant)
    pairs = deflated_power_sweep(a, 4, cfg=cfg)
    got = [p.eigentube for p in pairs]
    assert spectral_distance(got, exact) <= 1e-8 * max(1.0, a.frob_norm())
    u = concat_lateral([p.eigenslice for p in pairs])
    d = f_diagonal(got)
    res = (t_product(a, u) - t_product(u, d)).frob_norm()
    assert res <= 1e-8 * max(1.0, a.frob_norm())


def test_sweep_rejects_bad_count():
    with pytest.raises(ValueError):
        deflated_power_sweep(tridiag_tensor(), 11)


# ---------------------------------------------------------------------------
# subspace iteration


def test_subspace_full_matches_spectrum(rng):
    a, _ = well_separated_f_diagonal(rng, 4, 3)
    x = Tensor3(identity(4, 3).data + 0.2 * rng.standard_normal((4, 4, 3)))
    from tubal import t_inverse

    a = t_product(t_product(x, a), t_inverse(x))
    res = t_subspace_iteration(a, num=4, cfg=SolverConfig(rng_seed=0))
    assert res.converged
    exact = spectrum_of(a).eigentubes
    assert spectral_distance(res.diag_tubes(), exact) <= 1e-8 * max(
        1.0, a.frob_norm()
    )


def test_subspace_power_index_speeds_up():
    a = tridiag_tensor()
    r1 = t_subspace_iteration(a, num=4, cfg=SolverConfig(rng_seed=0, power_index=1))
    r4 = t_subspace_iteration(a, num=4, cfg=SolverConfig(rng_seed=0, power_index=4))
    assert r1.converged and r4.converged
    assert r4.iterations < r1.iterations
    exact = spectrum_of(a).eigentubes[:4]
    for res in (r1, r4):
        assert spectral_distance(res.diag_tubes(), exact) <= 1e-12
        assert t_product(conj_transpose(res.u), res.u).allclose(
            identity(4, 3), atol=1e-10
        )


def test_subspace_requires_size():
    with pytest.raises(ValueError):
        t_subspace_iteration(tridiag_tensor())


# ---------------------------------------------------------------------------
# QR algorithms


def test_qr_unshifted_identity_fixed_point():
    res = t_qr_unshifted(identity(3, 2), cfg=SolverConfig(iter_max=10, tol=1e-12))
    assert res.converged and res.iterations == 1
    assert res.r.allclose(identity(3, 2), atol=1e-12)


def test_qr_unshifted_n1_matches_matrix_iteration(rng):
    m = rng.standard_normal((3, 3))
    m = m @ m.T + 3 * np.eye(3)  # symmetric positive definite, fast to converge
    a = Tensor3(m[:, :, None])
    try:
        res = t_qr_unshifted(a, cfg=SolverConfig(iter_max=4, tol=1e-30))
    except NoConvergence as exc:
        res = exc.result
    # literal matrix QR iteration trajectory as the oracle, with the same
    # nonnegative-diagonal normalization
    cur = m.copy()
    for _ in range(4):
        q, r = np.linalg.qr(cur)
        d = np.sign(np.diag(r))
        q, r = q * d, d[:, None] * r
        cur = r @ q
    assert_allclose(res.r.face(0).real, cur, atol=1e-10)


def test_qr_unshifted_similarity_and_power_factorization(rng):
    a = random_tensor(rng, 3, 3, 2)
    try:
        res = t_qr_unshifted(a, cfg=SolverConfig(iter_max=5, tol=1e-30), keep_history=True)
    except NoConvergence as exc:
        res = exc.result
    exact = spectrum_of(a).eigentubes
    from tubal import facewise_sort_tubes

    for k, step in enumerate(res.history, start=1):
        # similarity: every iterate keeps the spectrum
        lam = facewise_sort_tubes(spectrum_of(step.iterate).eigentubes)
        assert spectral_distance(lam, exact) <= 1e-8 * max(1.0, a.frob_norm())
        # accumulated factors give a t-QR factorization of A^k
        recon = t_product(step.q_acc, step.r_acc)
        assert (recon - a**k).frob_norm() <= 1e-8 * max(1.0, (a**k).frob_norm())
        sim = t_product(
            t_product(conj_transpose(step.q_acc), a), step.q_acc
        )
        assert (sim - step.iterate).frob_norm() <= 1e-10 * max(1.0, a.frob_norm())


def test_qr_unshifted_f_hermitian_offdiag_decays(rng):
    a = f_hermitian_tensor(rng, 3, 2)
    try:
        res = t_qr_unshifted(a, cfg=SolverConfig(iter_max=400, tol=1e-10))
    except NoConvergence as exc:
        res = exc.result
    assert res.error_trace[-1] <= 1e-6 * a.frob_norm()


def test_qr_shifted_identity_immediate():
    res = t_qr_shifted(identity(3, 2), cfg=SolverConfig(iter_max=100))
    assert res.converged
    for t in res.diag_tubes():
        assert (t - unit_tube(2)).norm() <= 1e-10


def test_qr_shifted_f_hermitian(rng):
    a = f_hermitian_tensor(rng, 5, 3)
    res = t_qr_shifted(a, cfg=SolverConfig(iter_max=30000))
    assert res.converged
    from tubal import facewise_sort_tubes

    got = facewise_sort_tubes(res.diag_tubes())
    exact = spectrum_of(a).eigentubes
    assert spectral_distance(got, exact) <= 1e-10 * max(1.0, a.frob_norm())
    res_norm = (t_product(a, res.u) - t_product(res.u, res.r)).frob_norm()
    assert res_norm <= 1e-10 * max(1.0, a.frob_norm())


def test_qr_shifted_real_input_real_output():
    a = tridiag_tensor()
    res = t_qr_shifted(a, cfg=SolverConfig(iter_max=30000))
    assert res.converged
    assert res.u.is_real and res.r.is_real


def test_qr_shifted_complex_shift_mode(rng):
    # a real tensor whose first face has a complex conjugate eigenvalue pair
    rot = np.array([[0.6, -0.8], [0.8, 0.6]])
    data = np.zeros((2, 2, 2))
    data[:, :, 0] = 2 * rot
    data[:, :, 1] = 0.3 * np.eye(2)
    a = Tensor3(data)
    res = t_qr_shifted(a, cfg=SolverConfig(iter_max=5000, complex_shift=True))
    assert res.converged
    from tubal import facewise_sort_tubes

    got = facewise_sort_tubes(res.diag_tubes())
    exact = spectrum_of(a).eigentubes
    assert spectral_distance(got, exact) <= 1e-10 * max(1.0, a.frob_norm())


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(iter_max=0)
    with pytest.raises(ValueError):
        SolverConfig(power_index=0)
    with pytest.raises(ValueError):
        SolverConfig(deflation_variant="XX")
    with pytest.raises(ValueError):
        SolverConfig(shift_recovery="sideways")
