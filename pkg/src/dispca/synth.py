"""Deterministic synthetic DNS traffic with scheduled anomalies.

Stands in for real query logs: per-second query counts are fixed at
round(rate), domain popularity follows a Zipf law modulated by a few slow
sinusoidal latent factors (so the resulting histogram matrix has low
intrinsic dimension, like real traffic), an optional periodic spike
concentrates extra queries on one domain, and anomalies inject extra volume
(drawn from the current domain law) or extra dispersion (uniform over all
domains) at chosen bins. Everything is driven by one seeded generator, so a
fixed config reproduces the records bitwise, and the realized per-(bin,
domain) counts are returned as ground truth alongside the records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError
from .ingest import DnsRecord

ANOMALY_KINDS = ("volume", "dispersion")

# roughly 94% address lookups and 2.39% pointer lookups, the rest spread
# over a few other query types
DEFAULT_QTYPE_MIX = (
    ("A", 0.7211),
    ("AAAA", 0.22),
    ("PTR", 0.0239),
    ("MX", 0.02),
    ("TXT", 0.015),
)


@dataclass(frozen=True)
class SpikeConfig:
    """Periodic burst of extra queries concentrated on one domain."""

    period: int  # seconds between spikes, first at bin 0
    magnitude: float  # extra queries = round(rate * magnitude)
    domain: int = 0  # index of the domain receiving the burst

    def validate(self, n_domains: int) -> None:
        if self.period < 1:
            raise InvalidConfigError(f"spike period must be >= 1, got {self.period}")
        if not self.magnitude > 0:
            raise InvalidConfigError(f"spike magnitude must be > 0, got {self.magnitude}")
        if not 0 <= self.domain < n_domains:
            raise InvalidConfigError(f"spike domain {self.domain} outside 0..{n_domains - 1}")


@dataclass(frozen=True)
class AnomalySpec:
    """Extra traffic injected into one bin."""

    bin: int
    kind: str  # "volume": drawn from the bin's domain law; "dispersion": uniform
    magnitude: float  # extra queries = round(rate * magnitude)

    def validate(self, duration: int) -> None:
        if not 0 <= self.bin < duration:
            raise InvalidConfigError(f"anomaly bin {self.bin} outside 0..{duration - 1}")
        if self.kind not in ANOMALY_KINDS:
            raise InvalidConfigError(f"anomaly kind must be one of {ANOMALY_KINDS}, got {self.kind!r}")
        if not self.magnitude > 0:
            raise InvalidConfigError(f"anomaly magnitude must be > 0, got {self.magnitude}")


@dataclass(frozen=True)
class SynthConfig:
    """Full generator schedule; see module docstring for the model."""

    duration_seconds: int
    rate: float  # base queries per second (deterministic count round(rate))
    n_domains: int = 100
    zipf_exponent: float = 1.2
    qtype_mix: tuple[tuple[str, float], ...] = DEFAULT_QTYPE_MIX
    n_sources: int = 50
    n_destinations: int = 8
    spike: SpikeConfig | None = None
    anomalies: tuple[AnomalySpec, ...] = ()
    latent_factors: int = 0
    factor_strength: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_seconds < 1:
            raise InvalidConfigError(f"duration_seconds must be >= 1, got {self.duration_seconds}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise InvalidConfigError(f"rate must be a positive finite number, got {self.rate}")
        if self.n_domains < 1:
            raise InvalidConfigError(f"n_domains must be >= 1, got {self.n_domains}")
        if not (math.isfinite(self.zipf_exponent) and self.zipf_exponent >= 0):
            raise InvalidConfigError(f"zipf_exponent must be >= 0, got {self.zipf_exponent}")
        if not self.qtype_mix:
            raise InvalidConfigError("qtype_mix must be nonempty")
        names = [name for name, _ in self.qtype_mix]
        if len(set(names)) != len(names) or any(not name for name in names):
            raise InvalidConfigError("qtype_mix names must be nonempty and unique")
        if any(not (math.isfinite(p) and p > 0) for _, p in self.qtype_mix):
            raise InvalidConfigError("qtype_mix probabilities must be positive")
        if not 1 <= self.n_sources <= 65536 or not 1 <= self.n_destinations <= 65536:
            raise InvalidConfigError("n_sources and n_destinations must be in 1..65536")
        if self.spike is not None:
            self.spike.validate(self.n_domains)
        for spec in self.anomalies:
            spec.validate(self.duration_seconds)
        if self.latent_factors < 0:
            raise InvalidConfigError(f"latent_factors must be >= 0, got {self.latent_factors}")
        if not 0.0 <= self.factor_strength < 1.0:
            raise InvalidConfigError(
                f"factor_strength must be in [0, 1), got {self.factor_strength}"
            )
        if self.seed < 0:
            raise InvalidConfigError(f"seed must be >= 0, got {self.seed}")

    def to_dict(self) -> dict:
        return {
            "duration_seconds": self.duration_seconds,
            "rate": self.rate,
            "n_domains": self.n_domains,
            "zipf_exponent": self.zipf_exponent,
            "qtype_mix": [[name, p] for name, p in self.qtype_mix],
            "n_sources": self.n_sources,
            "n_destinations": self.n_destinations,
            "spike": None
            if self.spike is None
            else {
                "period": self.spike.period,
                "magnitude": self.spike.magnitude,
                "domain": self.spike.domain,
            },
            "anomalies": [
                {"bin": a.bin, "kind": a.kind, "magnitude": a.magnitude} for a in self.anomalies
            ],
            "latent_factors": self.latent_factors,
            "factor_strength": self.factor_strength,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SynthConfig":
        if not isinstance(obj, dict):
            raise InvalidConfigError("synth config must be a JSON object")
        known = {
            "duration_seconds",
            "rate",
            "n_domains",
            "zipf_exponent",
            "qtype_mix",
            "n_sources",
            "n_destinations",
            "spike",
            "anomalies",
            "latent_factors",
            "factor_strength",
            "seed",
        }
        unknown = set(obj) - known
        if unknown:
            raise InvalidConfigError(f"unknown synth config keys: {sorted(unknown)}")
        if "duration_seconds" not in obj or "rate" not in obj:
            raise InvalidConfigError("synth config requires duration_seconds and rate")
        kwargs = dict(obj)
        try:
            if "qtype_mix" in kwargs:
                mix = kwargs["qtype_mix"]
                pairs = mix.items() if isinstance(mix, dict) else mix
                kwargs["qtype_mix"] = tuple((str(name), float(p)) for name, p in pairs)
            if kwargs.get("spike") is not None:
                kwargs["spike"] = SpikeConfig(**kwargs["spike"])
            if "anomalies" in kwargs:
                kwargs["anomalies"] = tuple(AnomalySpec(**a) for a in kwargs["anomalies"])
        except (TypeError, ValueError) as exc:
            raise InvalidConfigError(f"bad synth config structure: {exc}") from exc
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidConfigError(f"bad synth config: {exc}") from exc


@dataclass(frozen=True)
class SynthTruth:
    """Realized generator schedule: what a perfect ingest must reproduce."""

    counts: np.ndarray  # int64 (duration, n_domains) realized per-bin counts
    anomaly_bins: tuple[int, ...]
    spike_bins: tuple[int, ...]
    domains: tuple[str, ...]  # all domain names in index order

    @property
    def bin_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def _domain_names(n: int) -> tuple[str, ...]:
    return tuple(f"dom{j:04d}.test" for j in range(n))


def _addr_pool(prefix: str, n: int) -> list[str]:
    return [f"{prefix}.{i >> 8}.{i & 255}" for i in range(n)]


def synth_traffic(config: SynthConfig) -> tuple[list[DnsRecord], SynthTruth]:
    """Generate records and the realized schedule for one config.

    The per-bin record count is deterministic: round(rate) base queries,
    plus round(rate * magnitude) for a spike or anomaly hitting the bin.
    Only the assignment of queries to domains, timestamps within the
    second, query types, and addresses is random, all from one seeded
    stream, so identical configs reproduce identical records.
    """
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    n_dom = cfg.n_domains
    duration = cfg.duration_seconds

    base_weights = (np.arange(1, n_dom + 1, dtype=np.float64)) ** (-cfg.zipf_exponent)
    base_pmf = base_weights / base_weights.sum()

    # slow sinusoidal factors over a handful of domain directions give the
    # count matrix a low-dimensional latent structure
    n_fac = cfg.latent_factors
    if n_fac > 0:
        loadings = rng.normal(size=(n_fac, n_dom))
        loadings /= np.abs(loadings).max(axis=1, keepdims=True)
        periods = rng.uniform(duration / 6.0, duration / 2.0, size=n_fac)
        phases = rng.uniform(0.0, 1.0, size=n_fac)
    else:
        loadings = np.zeros((0, n_dom))
        periods = np.zeros(0)
        phases = np.zeros(0)

    mix_names = [name for name, _ in cfg.qtype_mix]
    mix_p = np.array([p for _, p in cfg.qtype_mix], dtype=np.float64)
    mix_p = mix_p / mix_p.sum()
    src_pool = _addr_pool("10.0", cfg.n_sources)
    dst_pool = _addr_pool("192.168", cfg.n_destinations)
    dom_names = _domain_names(n_dom)

    base_count = int(round(cfg.rate))
    anomalies_at: dict[int, list[AnomalySpec]] = {}
    for spec in cfg.anomalies:
        anomalies_at.setdefault(spec.bin, []).append(spec)

    counts = np.zeros((duration, n_dom), dtype=np.int64)
    spike_bins: list[int] = []
    ts_parts: list[np.ndarray] = []
    dom_parts: list[np.ndarray] = []

    for b in range(duration):
        if n_fac > 0:
            wave = np.sin(2.0 * np.pi * (b / periods + phases))
            modulation = 1.0 + cfg.factor_strength * (wave @ loadings) / n_fac
            pmf = base_pmf * np.maximum(modulation, 1e-12)
            pmf = pmf / pmf.sum()
        else:
            pmf = base_pmf

        doms = [rng.choice(n_dom, size=base_count, p=pmf)] if base_count else []
        if cfg.spike is not None and b % cfg.spike.period == 0:
            spike_bins.append(b)
            extra = int(round(cfg.rate * cfg.spike.magnitude))
            if extra:
                doms.append(np.full(extra, cfg.spike.domain, dtype=np.int64))
        for spec in anomalies_at.get(b, ()):
            extra = int(round(cfg.rate * spec.magnitude))
            if not extra:
                continue
            if spec.kind == "volume":
                doms.append(rng.choice(n_dom, size=extra, p=pmf))
            else:
                doms.append(rng.integers(0, n_dom, size=extra))
        if not doms:
            continue
        dom_b = np.concatenate(doms).astype(np.int64)
        counts[b] = np.bincount(dom_b, minlength=n_dom)
        ts_parts.append(b + np.sort(rng.random(dom_b.size)))
        dom_parts.append(dom_b)

    if ts_parts:
        ts_all = np.concatenate(ts_parts).tolist()
        dom_all = np.concatenate(dom_parts).tolist()
    else:
        ts_all, dom_all = [], []
    total = len(ts_all)
    qt_idx = rng.choice(len(mix_names), size=total, p=mix_p).tolist()
    src_idx = rng.integers(0, cfg.n_sources, size=total).tolist()
    dst_idx = rng.integers(0, cfg.n_destinations, size=total).tolist()

    records = [
        DnsRecord(
            timestamp=ts_all[i],
            qname=dom_names[dom_all[i]],
            qtype=mix_names[qt_idx[i]],
            src=src_pool[src_idx[i]],
            dst=dst_pool[dst_idx[i]],
        )
        for i in range(total)
    ]
    truth = SynthTruth(
        counts=counts,
        anomaly_bins=tuple(sorted(anomalies_at)),
        spike_bins=tuple(spike_bins),
        domains=dom_names,
    )
    return records, truth
