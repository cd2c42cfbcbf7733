import math

import numpy as np
import pytest

from compress import (
    FLOAT_BITS,
    CompressorKind,
    CompressorSpec,
    certify,
    compress,
    identity_compressor,
    make_compressor,
    quantizer_bits,
)
from utils.errors import InvalidParamsError, NonFiniteInputError
from utils.utils import Verdict


def test_identity_is_exact_copy():
    spec = identity_compressor(4)
    x = np.array([1.0, -2.0, 0.5, 3.0])
    out = compress(spec, x, np.random.default_rng(0))
    np.testing.assert_array_equal(out, x)
    assert out is not x
    assert (spec.r, spec.delta) == (1.0, 1.0)
    assert spec.bits_per_vector() == FLOAT_BITS * 4


def test_quantizer_certificate_and_bits():
    spec = make_compressor({"kind": "dithered", "bits": 2}, 50)
    assert spec.r == pytest.approx(4.125)
    assert spec.delta == pytest.approx(1 / 4.125)
    assert spec.bits_per_vector() == 214
    assert quantizer_bits(50, 2) == 214
    assert quantizer_bits(1, 1) == 66
    with pytest.raises(InvalidParamsError):
        quantizer_bits(10, 0)


def test_quantizer_zero_vector_still_consumes_dither():
    spec = CompressorSpec(CompressorKind.DITHERED, 5, bits=2)
    rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
    out = compress(spec, np.zeros(5), rng_a)
    np.testing.assert_array_equal(out, np.zeros(5))
    rng_b.random(5)
    assert rng_a.random() == rng_b.random()


def test_quantizer_output_on_grid():
    spec = CompressorSpec(CompressorKind.DITHERED, 6, bits=2)
    x = np.array([0.3, -1.7, 0.9, 0.0, 2.0, -0.2])
    norm = 2.0
    out = compress(spec, x, np.random.default_rng(3))
    levels = out / (norm / 2)
    np.testing.assert_allclose(levels, np.round(levels), atol=1e-12)
    assert np.all(np.abs(out) <= norm + 1e-12)
    assert np.all(out * x >= 0)


def test_quantizer_is_unbiased():
    spec = CompressorSpec(CompressorKind.DITHERED, 5, bits=2)
    x = np.array([0.3, -1.0, 0.7, 0.0, 0.55])
    rng = np.random.default_rng(0)
    draws = np.stack([compress(spec, x, rng) for _ in range(10000)])
    std_error = draws.std(axis=0, ddof=1) / math.sqrt(len(draws))
    assert np.all(np.abs(draws.mean(axis=0) - x) <= 4 * std_error + 1e-12)


def test_topk_keeps_largest_with_stable_ties():
    spec = make_compressor({"kind": "topk", "fraction": 0.5}, 4)
    out = compress(spec, np.array([1.0, -3.0, 3.0, 0.5]), np.random.default_rng(0))
    np.testing.assert_array_equal(out, [0.0, -3.0, 3.0, 0.0])

    spec = make_compressor({"kind": "top_k", "fraction": 0.25}, 4)
    out = compress(spec, np.array([2.0, 2.0, 2.0, 1.0]), np.random.default_rng(0))
    np.testing.assert_array_equal(out, [2.0, 0.0, 0.0, 0.0])


def test_topk_certificate_and_bits():
    spec = make_compressor({"kind": "topk", "fraction": 0.1}, 100)
    assert spec.kept == 10
    assert spec.delta == pytest.approx(0.1)
    assert spec.bits_per_vector() == 10 * (FLOAT_BITS + 7)


def test_scaled_wraps_inner():
    spec = make_compressor({"kind": "scaled", "scale": 0.5, "inner": {"kind": "dithered", "bits": 3}}, 8)
    inner = make_compressor({"kind": "dithered", "bits": 3}, 8)
    assert spec.r == pytest.approx(0.5 * inner.r)
    assert spec.delta == pytest.approx(inner.delta)
    assert spec.bits_per_vector() == inner.bits_per_vector()
    x = np.linspace(-1, 1, 8)
    np.testing.assert_allclose(
        compress(spec, x, np.random.default_rng(5)),
        0.5 * compress(inner, x, np.random.default_rng(5)),
    )


def test_make_compressor_rejects_unknown_kind():
    with pytest.raises(InvalidParamsError):
        make_compressor({"kind": "sign"}, 4)
    with pytest.raises(InvalidParamsError):
        make_compressor({"kind": "topk", "fraction": 0.0}, 4)


def test_compress_validates_input():
    spec = identity_compressor(3)
    with pytest.raises(NonFiniteInputError):
        compress(spec, np.array([1.0, np.nan, 0.0]), np.random.default_rng(0))
    with pytest.raises(InvalidParamsError):
        compress(spec, np.ones(4), np.random.default_rng(0))


@pytest.mark.parametrize("p", [5, 20, 50])
@pytest.mark.parametrize("config", [
    {"kind": "identity"},
    {"kind": "dithered", "bits": 1},
    {"kind": "dithered", "bits": 2},
    {"kind": "topk", "fraction": 0.1},
    {"kind": "scaled", "scale": 0.8, "inner": {"kind": "dithered", "bits": 2}},
])
def test_certify_passes_for_shipped_compressors(config, p):
    report = certify(make_compressor(config, p), 2000, np.random.default_rng(p))
    assert report.passed, report
    assert report.verdict is Verdict.PASS


def test_certify_quantizer_contract_at_p50():
    spec = make_compressor({"kind": "dithered", "bits": 2}, 50)
    report = certify(spec, 10000, np.random.default_rng(0))
    assert report.mean_ratio <= (1 - spec.delta) * 1.05


def test_certify_reports_fail_without_raising():
    spec = make_compressor({"kind": "dithered", "bits": 2}, 10)
    report = certify(spec, 1000, np.random.default_rng(0), slack=-1.0)
    assert not report.passed
    assert report.verdict is Verdict.FAIL


def test_certify_needs_enough_samples():
    with pytest.raises(InvalidParamsError):
        certify(identity_compressor(3), 10, np.random.default_rng(0))
