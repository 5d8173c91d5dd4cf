import numpy as np
import pytest

import dispca.horizontal as hor
from dispca.errors import DataFormatError, DimensionMismatchError
from dispca.matrix import center_columns, thin_svd
from dispca.metrics import geodesic_distance

from helpers import frobenius, random_orthonormal, spectrum_matrix


def _split(x, s):
    return np.array_split(x, s, axis=0)


class TestLocalSummarize:
    def test_diagonal_example(self):
        summary = hor.local_summarize(np.diag([3.0, 1.0]), r=1)
        assert np.allclose(summary.singular_values, [3.0])
        assert np.allclose(np.abs(summary.right_vectors), [[1.0], [0.0]])

    def test_r_bounds(self):
        block = np.ones((3, 5)) + np.arange(15).reshape(3, 5)
        with pytest.raises(ValueError):
            hor.local_summarize(block, r=0)
        with pytest.raises(ValueError):
            hor.local_summarize(block, r=4)

    def test_payload_count(self):
        rng = np.random.default_rng(0)
        summary = hor.local_summarize(rng.normal(size=(10, 6)), r=3)
        assert summary.payload_values() == 3 + 6 * 3

    def test_full_rank_preserves_frobenius(self):
        # keeping all min(m, n) factors loses nothing: the scaled stack has
        # the same Frobenius norm and spectrum as the block
        rng = np.random.default_rng(1)
        x = rng.normal(size=(8, 5))
        summary = hor.local_summarize(x, r=5)
        stack = summary.singular_values[:, None] * summary.right_vectors.T
        assert abs(frobenius(stack) - frobenius(x)) < 1e-10
        assert np.allclose(
            thin_svd(stack).singular_values, thin_svd(x).singular_values, atol=1e-10
        )

    def test_tail_energy_identity(self):
        # dropped energy = sum of squared trailing singular values
        rng = np.random.default_rng(2)
        x = rng.normal(size=(12, 7))
        full = thin_svd(x)
        r = 3
        summary = hor.local_summarize(x, r=r)
        kept = summary.singular_values[:, None] * summary.right_vectors.T
        lost = frobenius(x) ** 2 - frobenius(kept) ** 2
        tail = float(np.sum(full.singular_values[r:] ** 2))
        assert abs(lost - tail) < 1e-8


class TestAggregate:
    def test_single_monitor_lossless(self):
        rng = np.random.default_rng(3)
        x = center_columns(rng.normal(size=(40, 8)))[0].values
        r = 8
        agg = hor.aggregate([hor.local_summarize(x, r=r, monitor_id=0)])
        central = thin_svd(x)
        for k in (1, 3, 8):
            gd = geodesic_distance(
                hor.principal_subspace(agg, k).basis, central.right[:, :k]
            )
            assert gd < 1e-6, f"k={k}: gd={gd}"

    def test_rank2_two_monitors_exact(self):
        # blocks share a rank-2 row space; r=2 summaries lose nothing
        rng = np.random.default_rng(4)
        basis = random_orthonormal(rng, 6, 2)
        coeff = rng.normal(size=(30, 2))
        x = coeff @ basis.T
        blocks = _split(x, 2)
        agg = hor.aggregate(
            [hor.local_summarize(b, r=2, monitor_id=i) for i, b in enumerate(blocks)]
        )
        gd = geodesic_distance(hor.principal_subspace(agg, 2).basis, basis)
        assert gd < 1e-6

    def test_spectrum_matches_centralized_when_lossless(self):
        rng = np.random.default_rng(5)
        x = spectrum_matrix(rng, 24, 6, [5.0, 4.0, 3.0, 2.0, 1.0, 0.5])
        blocks = _split(x, 3)
        summaries = [hor.local_summarize(b, r=6, monitor_id=i) for i, b in enumerate(blocks)]
        agg = hor.aggregate(summaries)
        assert np.allclose(
            agg.global_singular_values[:6], thin_svd(x).singular_values, atol=1e-8
        )

    def test_left_factor_invariance(self):
        # multiplying a block by an orthonormal matrix on the left must not
        # change its summary's contribution
        rng = np.random.default_rng(6)
        x = rng.normal(size=(20, 5))
        w = random_orthonormal(rng, 20, 20)
        s1 = hor.local_summarize(x, r=3)
        s2 = hor.local_summarize(w @ x, r=3)
        assert np.allclose(s1.singular_values, s2.singular_values, atol=1e-9)
        stack1 = s1.singular_values[:, None] * s1.right_vectors.T
        stack2 = s2.singular_values[:, None] * s2.right_vectors.T
        assert np.allclose(stack1.T @ stack1, stack2.T @ stack2, atol=1e-8)

    def test_stacking_order_does_not_change_subspace(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(30, 6))
        blocks = _split(x, 3)
        summaries = [hor.local_summarize(b, r=2, monitor_id=i) for i, b in enumerate(blocks)]
        agg_fwd = hor.aggregate(summaries)
        agg_rev = hor.aggregate(list(reversed(summaries)))
        gd = geodesic_distance(
            hor.principal_subspace(agg_fwd, 2), hor.principal_subspace(agg_rev, 2)
        )
        assert gd < 1e-10

    def test_stack_shape(self):
        rng = np.random.default_rng(8)
        blocks = _split(rng.normal(size=(40, 9)), 4)
        agg = hor.aggregate(
            [hor.local_summarize(b, r=3, monitor_id=i) for i, b in enumerate(blocks)]
        )
        assert agg.stacked.shape == (12, 9)

    def test_monitor_id_gaps_rejected(self):
        rng = np.random.default_rng(9)
        blocks = _split(rng.normal(size=(20, 4)), 2)
        with pytest.raises(ValueError):
            hor.aggregate(
                [
                    hor.local_summarize(blocks[0], r=2, monitor_id=0),
                    hor.local_summarize(blocks[1], r=2, monitor_id=2),
                ]
            )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            hor.aggregate([])

    def test_mixed_dimensions_rejected(self):
        rng = np.random.default_rng(10)
        a = hor.local_summarize(rng.normal(size=(10, 4)), r=2, monitor_id=0)
        b = hor.local_summarize(rng.normal(size=(10, 5)), r=2, monitor_id=1)
        with pytest.raises(DimensionMismatchError):
            hor.aggregate([a, b])

    def test_subspace_k_range(self):
        rng = np.random.default_rng(11)
        agg = hor.aggregate([hor.local_summarize(rng.normal(size=(10, 4)), r=2)])
        with pytest.raises(DimensionMismatchError):
            hor.principal_subspace(agg, 0)
        with pytest.raises(DimensionMismatchError):
            hor.principal_subspace(agg, 3)


class TestWireFormat:
    def test_round_trip(self):
        rng = np.random.default_rng(12)
        summary = hor.local_summarize(rng.normal(size=(15, 7)), r=4, monitor_id=3)
        back = hor.unpack_summary(hor.pack_summary(summary))
        assert back.monitor_id == 3
        assert np.array_equal(back.singular_values, summary.singular_values)
        assert np.array_equal(back.right_vectors, summary.right_vectors)

    def test_buffer_length_matches_payload(self):
        rng = np.random.default_rng(13)
        summary = hor.local_summarize(rng.normal(size=(9, 6)), r=2)
        buf = hor.pack_summary(summary)
        assert len(buf) == hor.SUMMARY_HEADER.size + 8 * summary.payload_values()

    def test_truncated_header(self):
        with pytest.raises(DataFormatError):
            hor.unpack_summary(b"\x00\x01")

    def test_truncated_body(self):
        rng = np.random.default_rng(14)
        buf = hor.pack_summary(hor.local_summarize(rng.normal(size=(8, 4)), r=2))
        with pytest.raises(DataFormatError):
            hor.unpack_summary(buf[:-8])

    def test_trailing_garbage(self):
        rng = np.random.default_rng(15)
        buf = hor.pack_summary(hor.local_summarize(rng.normal(size=(8, 4)), r=2))
        with pytest.raises(DataFormatError):
            hor.unpack_summary(buf + b"\x00" * 8)

    def test_aggregate_from_wire(self):
        rng = np.random.default_rng(16)
        x = rng.normal(size=(24, 5))
        blocks = _split(x, 2)
        bufs = [
            hor.pack_summary(hor.local_summarize(b, r=3, monitor_id=i))
            for i, b in enumerate(blocks)
        ]
        direct = hor.aggregate(
            [hor.local_summarize(b, r=3, monitor_id=i) for i, b in enumerate(blocks)]
        )
        wired = hor.aggregate([hor.unpack_summary(b) for b in bufs])
        assert np.array_equal(direct.stacked, wired.stacked)
