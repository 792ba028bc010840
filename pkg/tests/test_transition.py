"""One-step law: normalization, cut identity, and sampling fidelity."""

import math

import numpy as np
import pytest
from scipy import stats as sps

from dodewalk.spacefrac import (
    LatticeGeometry,
    SpectralMixture,
    StabilityError,
    tau_max,
)
from dodewalk.timefrac import weight_table
from dodewalk.transition import (
    build_kernel,
    build_partition,
    revisit_indices,
    sample_jump,
    sample_step,
)

KUSUMI = SpectralMixture(alphas=(2.0,), coefs=(9.0e6,))
GEO = LatticeGeometry(N=2, h=6.0, K=26)


def make_kernel(mix, geo, n=1, variant="caputo", tau_frac=1.0):
    tau = tau_frac * tau_max(mix, geo, variant=variant)
    return build_kernel(mix, geo, tau, weight_table(n, mix.beta, variant))


@pytest.mark.parametrize("variant", ("caputo", "gl"))
@pytest.mark.parametrize(
    "mix",
    (
        KUSUMI,
        SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.9),
        SpectralMixture(alphas=(0.8, 1.3, 1.8), coefs=(3e6,) * 3, beta=0.5),
    ),
)
def test_kernel_normalizes_to_top_weight(mix, variant):
    mix = SpectralMixture(alphas=mix.alphas, coefs=mix.coefs, beta=mix.beta)
    kern = make_kernel(mix, GEO, variant=variant, tau_frac=0.5)
    total = math.fsum([kern.p0] + list(kern.probs))
    assert abs(total - kern.markov_mass) < 1e-12
    assert kern.cumulative[-1] == pytest.approx(kern.markov_mass, abs=1e-12)
    assert kern.p0 > 0.0
    assert (kern.probs > 0.0).all()


def test_classical_kernel_is_four_point():
    kern = make_kernel(KUSUMI, GEO)
    assert kern.p0 == 0.0
    assert kern.n_entries == 4
    assert (kern.probs == 0.25).all()
    assert (kern.lengths_nm == 6.0).all()
    assert sorted(map(tuple, kern.offsets)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_step_zero_kernel_gets_the_full_unit():
    mix = SpectralMixture(alphas=(2.0,), coefs=(9.0e6,), beta=0.9)
    tau = 0.7 * tau_max(mix, GEO)
    k0 = build_kernel(mix, GEO, tau, weight_table(0, 0.9))
    k1 = build_kernel(mix, GEO, tau, weight_table(1, 0.9))
    assert k0.markov_mass == 1.0
    # same jump rates, the stay probability absorbs the difference
    assert (k0.probs == k1.probs).all()
    gamma1 = 2.0**0.1 - 1.0
    assert k0.p0 - k1.p0 == pytest.approx(gamma1, rel=1e-12)


def test_tau_at_limit_clamps_p0_to_zero():
    mix = SpectralMixture(alphas=(1.5, 2.0), coefs=(4.5e6, 4.5e6), beta=0.9)
    t_max = tau_max(mix, GEO)
    # inverting tau_max leaves p0 at round-off scale, either side of 0
    kern = build_kernel(mix, GEO, t_max, weight_table(1, 0.9))
    assert 0.0 <= kern.p0 < 1e-12
    # a hair above the limit lands in the negative clamp window
    kern = build_kernel(mix, GEO, t_max * (1 + 1e-13), weight_table(1, 0.9))
    assert kern.p0 == 0.0


def test_tau_beyond_limit_raises():
    mix = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.8)
    t_max = tau_max(mix, GEO)
    with pytest.raises(StabilityError):
        build_kernel(mix, GEO, 1.01 * t_max, weight_table(1, 0.8))
    with pytest.raises(ValueError):
        build_kernel(mix, GEO, 0.0, weight_table(1, 0.8))
    with pytest.raises(ValueError):
        build_kernel(mix, GEO, t_max, weight_table(1, 0.9))  # beta mismatch


def test_expected_jump_kusumi():
    mean, var = make_kernel(KUSUMI, GEO).expected_jump_nm()
    assert mean == 6.0
    assert var == 0.0


def test_partition_cuts_equal_weight_prefix_sums():
    for variant in ("caputo", "gl"):
        for n in (1, 2, 7, 40):
            table = weight_table(n, 0.85, variant)
            kern = build_kernel(
                SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.85),
                GEO,
                0.5 * tau_max(
                    SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.85),
                    GEO, variant=variant,
                ),
                table,
            )
            part = build_partition(table, kern)
            brute = np.array(
                [math.fsum(table.w[:j]) for j in range(n + 1)]
            )
            assert np.allclose(part.cuts, brute, rtol=0.0, atol=5e-15)
            assert part.p1_width == pytest.approx(
                math.fsum(table.w[:n]), abs=5e-15
            )


def test_partition_rejects_mismatched_kernel():
    mix9 = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.9)
    kern = make_kernel(mix9, GEO, tau_frac=0.5)
    with pytest.raises(ValueError):
        build_partition(weight_table(5, 0.9, "gl"), kern)


def test_sample_step_agrees_with_linear_scan():
    mix = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=0.7)
    table = weight_table(7, 0.7)
    kern = build_kernel(mix, GEO, 0.6 * tau_max(mix, GEO), table)
    part = build_partition(table, kern)
    cuts = part.cuts
    rng = np.random.default_rng(20240117)
    probes = list(rng.random(2000)) + [0.0] + list(cuts[1:]) + [
        np.nextafter(c, -1.0) for c in cuts[1:]
    ]
    for u in probes:
        choice = sample_step(part, float(u))
        if u < part.p1_width:
            # cell m covers [B_m, B_m+1); boundaries belong to the right
            m_scan = int(np.searchsorted(cuts, u, side="right")) - 1
            assert choice.kind == "revisit"
            assert choice.revisit_m == m_scan
        else:
            assert choice.kind == "jump"
    with pytest.raises(ValueError):
        sample_step(part, 1.0)
    with pytest.raises(ValueError):
        sample_step(part, -0.01)


def test_revisit_indices_vectorized_matches_scalar():
    mix = SpectralMixture(alphas=(2.0,), coefs=(9.0e6,), beta=0.6)
    table = weight_table(25, 0.6)
    kern = build_kernel(mix, GEO, 0.5 * tau_max(mix, GEO), table)
    part = build_partition(table, kern)
    rng = np.random.default_rng(7)
    u = rng.random(500) * part.p1_width
    vec = revisit_indices(part, u)
    assert (0 <= vec).all() and (vec <= 24).all()
    for ui, mi in zip(u[:100], vec[:100]):
        assert sample_step(part, float(ui)).revisit_m == mi


def test_sample_jump_respects_cumulative_cells():
    mix = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=1.0)
    kern = make_kernel(mix, GEO, tau_frac=0.4)
    cum = kern.cumulative
    # just below each boundary falls in the cell to its left
    for j in range(1, min(40, kern.n_entries)):
        below = np.nextafter(cum[j], -1.0)
        assert (sample_jump(kern, below) == kern.offsets[j - 1]).all()
        at = float(cum[j])
        if at < cum[-1]:
            assert (sample_jump(kern, at) == kern.offsets[j]).all()
    assert (sample_jump(kern, 0.0) == 0).all()  # p0 > 0 here
    # the top boundary rounding sliver maps to the last offset
    top = np.nextafter(float(cum[-1]), 1.0)
    assert (sample_jump(kern, top) == kern.offsets[-1]).all()


def test_sampled_jump_frequencies_match_kernel():
    mix = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=1.0)
    geo = LatticeGeometry(N=2, h=6.0, K=5)
    kern = make_kernel(mix, geo, tau_frac=0.7)
    rng = np.random.Generator(np.random.Philox(key=991))
    u = rng.random(1_000_000) * float(kern.cumulative[-1])
    idx = np.searchsorted(kern.cumulative, u, side="right")
    idx = np.minimum(idx, kern.n_entries)
    counts = np.bincount(idx, minlength=kern.n_entries + 1)
    expected = np.concatenate(([kern.p0], kern.probs))
    expected = expected / expected.sum() * len(u)
    # merge cells with tiny expectation so the chi-square stays valid
    keep = expected >= 10.0
    obs = np.append(counts[keep], counts[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0.0:
        obs, exp = obs[:-1], exp[:-1]
    p_value = sps.chisquare(obs, exp).pvalue
    assert p_value > 0.001


def test_sampled_revisit_frequencies_match_weights():
    mix = SpectralMixture(alphas=(2.0,), coefs=(9.0e6,), beta=0.8)
    table = weight_table(50, 0.8)
    kern = build_kernel(mix, GEO, 0.5 * tau_max(mix, GEO), table)
    part = build_partition(table, kern)
    rng = np.random.Generator(np.random.Philox(key=424242))
    u = rng.random(1_000_000) * part.p1_width
    m = revisit_indices(part, u)
    counts = np.bincount(m, minlength=50)
    expected = table.w[:50] / table.w[:50].sum() * len(u)
    p_value = sps.chisquare(counts, expected).pvalue
    assert p_value > 0.001


def test_tail_remainder_is_small_and_positive():
    mix = SpectralMixture(alphas=(1.5,), coefs=(9.0e6,), beta=1.0)
    kern = make_kernel(mix, GEO, tau_frac=1.0)
    assert 0.0 < kern.tail_remainder < 0.01 * kern.markov_mass
