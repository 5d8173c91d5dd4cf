"""DNS-query ingestion into a per-second traffic histogram matrix.

Records are simple CSV lines (timestamp,qname,qtype,src,dst). Queries are
grouped into one-second bins keyed by the integer part of the timestamp, and
each bin becomes a histogram over domain names. Only the globally most
frequent domains are kept as matrix columns, but per-bin summary statistics
(norm, entropy, retained fraction) are always computed on the full
per-domain histogram so truncation cannot hide traffic shifts.
"""

from __future__ import annotations

import gzip
import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._kernels import aggregate_bins
from .errors import DataFormatError
from .matrix import DataMatrix

RECORD_FIELDS = ("timestamp", "qname", "qtype", "src", "dst")


@dataclass(frozen=True, slots=True)
class DnsRecord:
    """One DNS query observation."""

    timestamp: float  # seconds, finite, >= 0
    qname: str  # nonempty domain name
    qtype: str
    src: str
    dst: str


@dataclass(frozen=True)
class ParseResult:
    records: list[DnsRecord]
    malformed: int


def parse_records(lines) -> ParseResult:
    """Parse CSV record lines; malformed lines are tallied, not fatal.

    A line is malformed when it does not have exactly 5 comma-separated
    fields, its timestamp is not a finite nonnegative number, or its qname
    is empty. Blank lines and '#' comment lines are skipped silently.
    """
    records: list[DnsRecord] = []
    malformed = 0
    for raw in lines:
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 5:
            malformed += 1
            continue
        ts_text, qname, qtype, src, dst = parts
        try:
            ts = float(ts_text)
        except ValueError:
            malformed += 1
            continue
        if not math.isfinite(ts) or ts < 0 or not qname:
            malformed += 1
            continue
        records.append(DnsRecord(timestamp=ts, qname=qname, qtype=qtype, src=src, dst=dst))
    return ParseResult(records=records, malformed=malformed)


def read_records(path) -> ParseResult:
    """Parse a records file; .gz paths are decompressed transparently."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_records(fh)


def write_records_csv(records, fh) -> None:
    """Emit records in the parseable CSV format (repr timestamps round-trip)."""
    for rec in records:
        fh.write(f"{rec.timestamp!r},{rec.qname},{rec.qtype},{rec.src},{rec.dst}\n")


class BinStats(NamedTuple):
    norm: float  # Euclidean norm of the full per-domain count histogram
    entropy: float  # Shannon entropy in bits of the full histogram
    fraction: float  # retained traffic / total traffic (1.0 for empty bins)


@dataclass(frozen=True)
class HistogramMatrix:
    """Per-second counts of the retained top domains plus full-histogram stats."""

    matrix: DataMatrix  # m bins x K domains, col_names = domains
    domains: tuple[str, ...]  # retained qnames, most frequent first
    per_bin: tuple[BinStats, ...]
    bin_start: int  # integer second of the first bin
    bin_seconds: int = 1

    @property
    def n_bins(self) -> int:
        return self.matrix.m

    def meta_dict(self) -> dict:
        """JSON-ready sidecar: domains, bin layout, per-bin statistics."""
        return {
            "bin_start": self.bin_start,
            "bin_seconds": self.bin_seconds,
            "n_bins": self.n_bins,
            "domains": list(self.domains),
            "per_bin": [
                {"norm": b.norm, "entropy": b.entropy, "fraction": b.fraction}
                for b in self.per_bin
            ],
        }


def build_histogram_matrix(records, top_k: int) -> HistogramMatrix:
    """Bin queries into seconds and count the globally top-k domains per bin.

    Bins cover every second from floor(min timestamp) through floor(max
    timestamp) inclusive, so a record with an exactly integral maximal
    timestamp still lands in a bin. Domains rank by global count, ties by
    name; if fewer than top_k distinct domains exist, all are retained.
    """
    records = list(records)
    if not records:
        raise DataFormatError("no records to aggregate")
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")

    ts = np.array([rec.timestamp for rec in records], dtype=np.float64)
    bin_start = int(math.floor(ts.min()))
    n_bins = int(math.floor(ts.max())) - bin_start + 1
    bin_idx = np.floor(ts).astype(np.int64) - bin_start

    counts = Counter(rec.qname for rec in records)
    names = sorted(counts)
    name_id = {name: i for i, name in enumerate(names)}
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    retained_names = tuple(name for name, _ in ranked[: min(top_k, len(ranked))])
    col_of_domain = np.full(len(names), -1, dtype=np.int64)
    for j, name in enumerate(retained_names):
        col_of_domain[name_id[name]] = j

    dom_idx = np.fromiter((name_id[rec.qname] for rec in records), dtype=np.int64, count=len(records))
    matrix, totals, norms, entropies, retained = aggregate_bins(
        bin_idx, dom_idx, n_bins, col_of_domain, len(retained_names)
    )
    fraction = np.ones(n_bins, dtype=np.float64)
    nz = totals > 0
    fraction[nz] = retained[nz] / totals[nz]
    per_bin = tuple(
        BinStats(norm=float(norms[i]), entropy=float(entropies[i]), fraction=float(fraction[i]))
        for i in range(n_bins)
    )
    return HistogramMatrix(
        matrix=DataMatrix(values=matrix, col_names=retained_names),
        domains=retained_names,
        per_bin=per_bin,
        bin_start=bin_start,
    )


def field_histograms(records, field: str, top_n: int) -> list[tuple[str, int, float]]:
    """Most frequent values of one record field with their traffic shares.

    Returns at most top_n (value, count, share) triples ranked by count
    descending, ties by value; shares are relative to the total record
    count. Fewer distinct values than top_n returns them all.
    """
    if field not in RECORD_FIELDS[1:]:
        raise ValueError(f"field must be one of {RECORD_FIELDS[1:]}, got {field!r}")
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    records = list(records)
    if not records:
        return []
    counts = Counter(getattr(rec, field) for rec in records)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    total = len(records)
    return [(value, count, count / total) for value, count in ranked[:top_n]]
