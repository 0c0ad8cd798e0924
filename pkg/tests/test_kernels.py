import math

import numpy as np
import pytest
from scipy import stats

from wallsep import kernels as K


class TestStreams:
    def test_python_and_vectorized_streams_match(self):
        s = K.Stream(12345)
        seq = [s.next_u64() for _ in range(64)]
        vec = K.stream_u64(12345, 64)
        assert seq == [int(v) for v in vec]

    def test_derive_seed_matches_kernel_derivation(self):
        # replica 0 of the in-kernel ensemble must be reproducible from the
        # documented python-side seed derivation
        _, _, jh = K.sep_identity_ensemble(16, 2.0, 4, 999)
        bits = np.array([x & 1 for x in range(16)], np.uint8)
        pos = np.arange(16, dtype=np.int64)
        lab = np.arange(16, dtype=np.int64)
        disp = np.zeros(16, np.int64)
        h = np.array([x & 1 for x in range(16)], np.int64)
        seed0 = K.derive_seed(999, 0)
        j = 0
        for half in range(2):
            dj, _, _ = K.sep_run(bits, pos, lab, disp, h, True, 1.0,
                                 K.useed(_mix_py(seed0 + half)))
            j += dj
        assert j == jh[0, 0]

    def test_useed_handles_full_range(self):
        big = (1 << 64) - 3
        assert int(K.useed(big)) == big


def _mix_py(z):
    z &= K.MASK64
    z = ((z ^ (z >> 30)) * K.MIX1) & K.MASK64
    z = ((z ^ (z >> 27)) * K.MIX2) & K.MASK64
    return (z ^ (z >> 31)) & K.MASK64


class TestPoissonSampler:
    @pytest.mark.parametrize("lam", [0.5, 3.0, 9.9, 10.1, 50.0, 4000.0])
    def test_moments(self, lam):
        n = 40000
        draws = K.poisson_sample_array(lam, n, 2718)
        mean = draws.mean()
        var = draws.var(ddof=1)
        assert abs(mean - lam) < 5 * math.sqrt(lam / n)
        assert abs(var - lam) < 6 * lam * math.sqrt(2.0 / n)

    def test_small_lambda_distribution(self):
        n = 200000
        draws = K.poisson_sample_array(2.0, n, 137)
        ks = np.arange(0, 12)
        expected = stats.poisson.pmf(ks, 2.0) * n
        observed = np.array([(draws == k).sum() for k in ks])
        chi2 = float(((observed - expected) ** 2 / np.maximum(expected, 1)).sum())
        assert chi2 < stats.chi2.ppf(0.9999, len(ks) - 1)

    def test_large_lambda_distribution(self):
        n = 100000
        lam = 200.0
        draws = K.poisson_sample_array(lam, n, 138)
        # compare a central window against the exact pmf
        ks = np.arange(170, 231)
        expected = stats.poisson.pmf(ks, lam) * n
        observed = np.array([(draws == k).sum() for k in ks])
        chi2 = float(((observed - expected) ** 2 / np.maximum(expected, 1)).sum())
        assert chi2 < stats.chi2.ppf(0.9999, len(ks) - 1)

    def test_zero_rate(self):
        assert K.poisson_sample_array(0.0, 5, 1).tolist() == [0] * 5
