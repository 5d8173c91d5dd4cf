import gzip
import io

import numpy as np
import pytest

from dispca.errors import DataFormatError
from dispca.ingest import (
    DnsRecord,
    build_histogram_matrix,
    field_histograms,
    parse_records,
    read_records,
    write_records_csv,
)
from dispca.synth import SynthConfig, synth_traffic


def _rec(ts, qname="example.com", qtype="A", src="10.0.0.1", dst="8.8.8.8"):
    return DnsRecord(timestamp=ts, qname=qname, qtype=qtype, src=src, dst=dst)


class TestParseRecords:
    def test_well_formed_line(self):
        result = parse_records(["12.5,example.com,A,10.0.0.1,8.8.8.8\n"])
        assert result.malformed == 0
        rec = result.records[0]
        assert rec.timestamp == 12.5
        assert rec.qname == "example.com"
        assert rec.qtype == "A"
        assert rec.src == "10.0.0.1"
        assert rec.dst == "8.8.8.8"

    def test_field_count_must_be_five(self):
        result = parse_records(["1.0,example.com,A\n", "1.0,a,A,s,d,extra\n"])
        assert result.malformed == 2
        assert result.records == []

    def test_bad_timestamps(self):
        lines = [
            "abc,example.com,A,s,d\n",
            "-1.0,example.com,A,s,d\n",
            "inf,example.com,A,s,d\n",
            "nan,example.com,A,s,d\n",
        ]
        result = parse_records(lines)
        assert result.malformed == 4

    def test_empty_qname_rejected(self):
        result = parse_records(["1.0,,A,s,d\n"])
        assert result.malformed == 1

    def test_blank_and_comment_lines_skipped_silently(self):
        lines = ["\n", "   \n", "# a comment\n", "  # indented comment\n", "1.0,q.com,A,s,d\n"]
        result = parse_records(lines)
        assert result.malformed == 0
        assert len(result.records) == 1

    def test_mixed_corruption_tally(self):
        good = [f"{i}.5,dom{i % 7}.com,A,s,d\n" for i in range(990)]
        bad = ["broken\n"] * 10
        result = parse_records(good + bad)
        assert len(result.records) == 990
        assert result.malformed == 10

    def test_write_then_parse_round_trip(self):
        records = [
            _rec(0.1),
            _rec(0.30000000000000004, qname="odd.example"),
            _rec(123456789.125),
        ]
        buf = io.StringIO()
        write_records_csv(records, buf)
        back = parse_records(buf.getvalue().splitlines(keepends=True))
        assert back.malformed == 0
        assert back.records == records

    def test_gzip_round_trip(self, tmp_path):
        path = tmp_path / "records.csv.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            write_records_csv([_rec(7.25), _rec(8.5, qname="b.com")], fh)
        result = read_records(path)
        assert result.malformed == 0
        assert [r.timestamp for r in result.records] == [7.25, 8.5]

    def test_plain_file_read(self, tmp_path):
        path = tmp_path / "records.csv"
        path.write_text("# header comment\n3.5,x.com,A,s,d\n")
        result = read_records(path)
        assert len(result.records) == 1


class TestBuildHistogramMatrix:
    def test_two_bins_top1(self):
        records = [_rec(0.1, "a.com"), _rec(0.2, "a.com"), _rec(1.5, "b.com")]
        hist = build_histogram_matrix(records, top_k=1)
        assert hist.domains == ("a.com",)
        assert hist.bin_start == 0
        assert hist.n_bins == 2
        assert np.array_equal(hist.matrix.values, [[2.0], [0.0]])

    def test_rank_ties_break_by_name(self):
        records = [_rec(0.0, "zz.com"), _rec(0.3, "aa.com")]
        hist = build_histogram_matrix(records, top_k=1)
        assert hist.domains == ("aa.com",)

    def test_bin_range_covers_integral_max_timestamp(self):
        # a record exactly on an integer second still needs its own bin
        records = [_rec(0.5, "a.com"), _rec(3.0, "a.com")]
        hist = build_histogram_matrix(records, top_k=1)
        assert hist.n_bins == 4
        assert np.array_equal(hist.matrix.values[:, 0], [1.0, 0.0, 0.0, 1.0])

    def test_nonzero_start_bin(self):
        records = [_rec(100.2, "a.com"), _rec(101.9, "a.com")]
        hist = build_histogram_matrix(records, top_k=3)
        assert hist.bin_start == 100
        assert hist.n_bins == 2

    def test_empty_bin_stats(self):
        records = [_rec(0.5, "a.com"), _rec(2.5, "a.com")]
        hist = build_histogram_matrix(records, top_k=1)
        empty = hist.per_bin[1]
        assert empty.norm == 0.0
        assert empty.entropy == 0.0
        assert empty.fraction == 1.0

    def test_uniform_300_domains_entropy(self):
        records = [_rec(0.001 * i, f"d{i:03d}.com") for i in range(300)]
        hist = build_histogram_matrix(records, top_k=300)
        assert abs(hist.per_bin[0].entropy - np.log2(300.0)) < 1e-12
        assert abs(hist.per_bin[0].norm - np.sqrt(300.0)) < 1e-12
        assert hist.per_bin[0].fraction == 1.0

    def test_stats_cover_dropped_domains(self):
        # top_k=1 keeps one column, but norm/entropy/fraction see all traffic
        records = [
            _rec(0.1, "big.com"),
            _rec(0.2, "big.com"),
            _rec(0.3, "small.com"),
            _rec(0.4, "tiny.com"),
        ]
        hist = build_histogram_matrix(records, top_k=1)
        stats = hist.per_bin[0]
        assert abs(stats.norm - np.sqrt(4.0 + 1.0 + 1.0)) < 1e-12
        assert stats.fraction == 0.5
        expected = -(0.5 * np.log2(0.5) + 2 * 0.25 * np.log2(0.25))
        assert abs(stats.entropy - expected) < 1e-12

    def test_top_k_saturates_at_distinct_count(self):
        records = [_rec(0.1, "a.com"), _rec(0.2, "b.com")]
        hist = build_histogram_matrix(records, top_k=50)
        assert hist.domains == ("a.com", "b.com")
        assert hist.matrix.n == 2

    def test_record_order_does_not_matter(self):
        records = [_rec(0.1 * i, f"d{i % 5}.com") for i in range(40)]
        fwd = build_histogram_matrix(records, top_k=3)
        rev = build_histogram_matrix(list(reversed(records)), top_k=3)
        assert fwd.domains == rev.domains
        assert np.array_equal(fwd.matrix.values, rev.matrix.values)
        assert fwd.per_bin == rev.per_bin

    def test_matrix_matches_generator_schedule(self):
        # synthetic traffic carries its own exact per-bin counts; ingesting
        # the records must reproduce them for every retained domain
        config = SynthConfig(duration_seconds=60, rate=30.0, n_domains=20, seed=11)
        records, truth = synth_traffic(config)
        hist = build_histogram_matrix(records, top_k=20)
        for j, name in enumerate(hist.domains):
            col = truth.counts[:, truth.domains.index(name)]
            assert np.array_equal(hist.matrix.values[:, j], col.astype(float))

    def test_meta_dict_shape(self):
        records = [_rec(0.1, "a.com"), _rec(1.2, "b.com")]
        meta = build_histogram_matrix(records, top_k=2).meta_dict()
        assert meta["n_bins"] == 2
        assert meta["bin_start"] == 0
        assert meta["bin_seconds"] == 1
        assert meta["domains"] == ["a.com", "b.com"]
        assert len(meta["per_bin"]) == 2
        assert set(meta["per_bin"][0]) == {"norm", "entropy", "fraction"}

    def test_no_records_rejected(self):
        with pytest.raises(DataFormatError):
            build_histogram_matrix([], top_k=5)

    def test_bad_top_k(self):
        with pytest.raises(ValueError):
            build_histogram_matrix([_rec(0.1)], top_k=0)


class TestFieldHistograms:
    def test_qtype_example(self):
        records = [
            _rec(0.1, qtype="A"),
            _rec(0.2, qtype="A"),
            _rec(0.3, qtype="AAAA"),
            _rec(0.4, qtype="PTR"),
        ]
        top = field_histograms(records, "qtype", top_n=2)
        assert top == [("A", 2, 0.5), ("AAAA", 1, 0.25)]

    def test_tie_breaks_by_value(self):
        records = [_rec(0.1, qtype="TXT"), _rec(0.2, qtype="MX")]
        top = field_histograms(records, "qtype", top_n=1)
        assert top == [("MX", 1, 0.5)]

    def test_all_fields_supported(self):
        records = [_rec(0.1, src="s1", dst="d1")]
        for field in ("qname", "qtype", "src", "dst"):
            assert len(field_histograms(records, field, top_n=5)) == 1

    def test_timestamp_not_a_field(self):
        with pytest.raises(ValueError):
            field_histograms([_rec(0.1)], "timestamp", top_n=1)

    def test_empty_records(self):
        assert field_histograms([], "qtype", top_n=3) == []

    def test_top_n_validation(self):
        with pytest.raises(ValueError):
            field_histograms([_rec(0.1)], "qtype", top_n=0)
