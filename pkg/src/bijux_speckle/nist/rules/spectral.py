"""Discrete Fourier transform (spectral) test."""

from __future__ import annotations

import math

import numpy as np
from scipy import fft
from scipy.special import erfc

from bijux_speckle.enums import RandomnessTest

from .types import Bits, TestResult, plus_minus, require_length, result

FFT_MIN_BITS = 1000


def spectral(bits: Bits) -> TestResult:
    test = RandomnessTest.FFT
    n = require_length(test, bits, FFT_MIN_BITS)
    moduli = np.abs(fft.fft(plus_minus(bits).astype(np.float64))[: n // 2])
    threshold = math.sqrt(math.log(1.0 / 0.05) * n)
    expected = 0.95 * n / 2.0
    observed = int(np.count_nonzero(moduli < threshold))
    d = (observed - expected) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return result(
        test,
        erfc(abs(d) / math.sqrt(2.0)),
        n=n,
        threshold=threshold,
        peaks_below=observed,
        expected_below=expected,
        d=d,
    )
