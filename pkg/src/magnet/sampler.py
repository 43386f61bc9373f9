"""Exact samplers for MAG graphs and node degrees.

Two routes produce degrees with identical laws:

* ``sample_graph`` materializes the whole graph: attribute rows are
  bit-packed into uint64 words, each unordered pair (u, v) gets one
  uniform, and the edge test compares it against
  ``exp(c11 ln q11 + c10 ln q10 + c00 ln q00)`` where c11/c10 come from
  popcounts of AND/XOR of the packed rows and ``c00 = l - c11 - c10``.

* ``sample_degrees_direct`` skips the graph and draws from the compound
  binomial directly: S ~ Bin(l, mu1), then D ~ Bin(n - 1, p_S).  Binomial
  draws are exact-distribution: vectorized sequential inversion when the
  mean is at most ``INVERSION_MEAN_MAX``, an exact-rejection generator
  (numpy's binomial) seeded per draw otherwise.  No normal approximation
  anywhere.

All randomness is counter-based (see ``_rng``): every value is a pure
function of ``(seed, stream tag, index)``, so outputs are independent of
chunking and thread count, and replicate r of a batch equals the graph
sampled standalone with replicate r's derived seed.
"""

from __future__ import annotations

import concurrent.futures
import enum
import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from . import _rng
from .errors import BudgetError, InvalidParamsError
from .model import ModelParams, derive_constants, _check_n
from .degree_dist import _check_l

__all__ = [
    "SampleMethod",
    "MagGraph",
    "DegreeSampleSet",
    "link_probability",
    "sample_graph",
    "sample_degrees_direct",
    "sample_degrees_fullgraph",
    "write_edge_list",
    "write_attributes",
    "write_degrees_csv",
    "DEFAULT_PAIR_BUDGET",
]

DEFAULT_PAIR_BUDGET = 10 ** 9

#: Mean at or below which binomial draws use sequential inversion.
INVERSION_MEAN_MAX = 30.0

#: Target element count per vectorized work chunk.
_CHUNK_ELEMS = 1 << 22


# =====================================================================
# Bit-packed attribute rows
# =====================================================================

def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack 0/1 arrays of shape (..., l) into uint64 words (..., ceil(l/64))."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    l = bits.shape[-1]
    n_bytes = ((l + 63) // 64) * 8
    packed = np.packbits(bits, axis=-1, bitorder="little")
    if packed.shape[-1] < n_bytes:
        pad = np.zeros(bits.shape[:-1] + (n_bytes - packed.shape[-1],), dtype=np.uint8)
        packed = np.concatenate([packed, pad], axis=-1)
    return np.ascontiguousarray(packed).view(np.uint64)


def unpack_rows(words: np.ndarray, l: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`: (..., W) uint64 -> (..., l) uint8."""
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :l]


def _popcount(words: np.ndarray) -> np.ndarray:
    """Total set bits along the last (word) axis."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def _log_link(c11: np.ndarray, c10: np.ndarray, l: int, params: ModelParams) -> np.ndarray:
    lq11 = math.log(params.q11)
    lq10 = math.log(params.q10)
    lq00 = math.log(params.q00)
    c00 = l - c11 - c10
    return c11 * lq11 + c10 * lq10 + c00 * lq00


def link_probability(row_u, row_v, params: ModelParams) -> float:
    """Edge probability of two attribute rows: prod_j q(a_j, b_j).

    Accepts 0/1 sequences of equal length; the product is evaluated from
    popcounts of the packed rows, in log space.
    """
    a = np.asarray(row_u)
    b = np.asarray(row_v)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape or a.size < 1:
        raise InvalidParamsError("attribute rows must be equal-length 1-D arrays, length >= 1")
    if not (np.isin(a, (0, 1)).all() and np.isin(b, (0, 1)).all()):
        raise InvalidParamsError("attribute rows must contain only 0/1 entries")
    l = int(a.size)
    wa = pack_rows(a.astype(np.uint8))
    wb = pack_rows(b.astype(np.uint8))
    c11 = int(_popcount(wa & wb))
    c10 = int(_popcount(wa ^ wb))
    return math.exp(float(_log_link(np.int64(c11), np.int64(c10), l, params)))


# =====================================================================
# Result containers
# =====================================================================

class SampleMethod(enum.Enum):
    FULL_GRAPH = "fullgraph"
    DIRECT = "direct"


@dataclass(frozen=True)
class MagGraph:
    """A sampled MAG graph: packed attribute rows plus a sorted edge array.

    Edges are unordered pairs stored as rows (u, v) with u < v, sorted
    lexicographically; the graph is simple (no self-loops, no duplicates).
    """

    params: ModelParams
    n: int
    l: int
    seed: int
    attr_words: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    def degree(self, u: int) -> int:
        if not 0 <= u < self.n:
            raise InvalidParamsError(f"node index out of range: {u}")
        return int((self.edges == u).sum())

    def attribute_bits(self, u: int) -> np.ndarray:
        if not 0 <= u < self.n:
            raise InvalidParamsError(f"node index out of range: {u}")
        return unpack_rows(self.attr_words[u], self.l)

    def attribute_matrix(self) -> np.ndarray:
        return unpack_rows(self.attr_words, self.l)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}


@dataclass(frozen=True)
class DegreeSampleSet:
    """Monte Carlo degree draws with full provenance."""

    params: ModelParams
    n: int
    l: int
    seed: int
    method: SampleMethod
    degrees: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.degrees.shape[0])


# =====================================================================
# Full-graph sampling
# =====================================================================

def _attr_bits_for_seed(seeds: np.ndarray, n: int, l: int, mu1: float) -> np.ndarray:
    """Attribute bit matrices, one per seed: shape (len(seeds), n, l) uint8."""
    keys = _stream_keys(seeds, _rng.TAG_ATTR_BITS)
    idx = np.arange(n * l, dtype=np.uint64)
    u = _uniform_matrix(keys, idx)
    return (u < mu1).astype(np.uint8).reshape(len(seeds), n, l)


def _stream_keys(seeds: np.ndarray, tag: int) -> np.ndarray:
    """Vectorized :func:`_rng.stream_key` over a uint64 seed array."""
    s = seeds.astype(np.uint64, copy=False)
    h = _rng.mix64_array(s ^ np.uint64((tag * _rng.GOLDEN) & ((1 << 64) - 1)))
    return _rng.mix64_array(h + np.uint64(_rng.GOLDEN))


def _uniform_matrix(keys: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Uniforms at positions ``idx`` for every key: shape (len(keys), len(idx))."""
    state = keys[:, None] + (idx[None, :] + np.uint64(1)) * np.uint64(_rng.GOLDEN)
    w = _rng.mix64_array(state)
    return (w >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def _pair_index(u: int, v: np.ndarray, n: int) -> np.ndarray:
    """Linear index of pair (u, v), u < v, in row-major upper-triangle order."""
    return u * n - (u * (u + 1)) // 2 + (v - u - 1)


def sample_graph(params: ModelParams, n: int, l: int, seed: int,
                 pair_budget: int = DEFAULT_PAIR_BUDGET) -> MagGraph:
    """Sample one MAG graph at (params, n, l) under ``seed``.

    Raises :class:`BudgetError` when n(n-1)/2 exceeds ``pair_budget``.
    """
    _check_n(n)
    _check_l(l)
    _check_seed(seed)
    pairs = n * (n - 1) // 2
    if pairs > pair_budget:
        raise BudgetError(
            f"{pairs} node pairs exceed the pair budget of {pair_budget}; "
            f"raise the budget or reduce n"
        )

    bits = _attr_bits_for_seed(np.array([seed], dtype=np.uint64), n, l, params.mu1)[0]
    words = pack_rows(bits)

    key_pair = _rng.stream_key(seed, _rng.TAG_PAIR_UNIF)
    chunks_u: list[np.ndarray] = []
    chunks_v: list[np.ndarray] = []
    row_block = max(1, _CHUNK_ELEMS // max(1, n))
    for u0 in range(0, n - 1, row_block):
        u1 = min(u0 + row_block, n - 1)
        uu_list = []
        vv_list = []
        for u in range(u0, u1):
            vs = np.arange(u + 1, n, dtype=np.int64)
            c11 = _popcount(words[u][None, :] & words[u + 1:])
            c10 = _popcount(words[u][None, :] ^ words[u + 1:])
            log_p = _log_link(c11, c10, l, params)
            unif = _rng.uniforms_at(key_pair, _pair_index(u, vs, n))
            hit = unif <= np.exp(log_p)
            if hit.any():
                uu_list.append(np.full(int(hit.sum()), u, dtype=np.int64))
                vv_list.append(vs[hit])
        if uu_list:
            chunks_u.append(np.concatenate(uu_list))
            chunks_v.append(np.concatenate(vv_list))
    if chunks_u:
        edges = np.stack(
            [np.concatenate(chunks_u), np.concatenate(chunks_v)], axis=1
        )
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return MagGraph(params=params, n=n, l=l, seed=seed, attr_words=words, edges=edges)


def replicate_seed(seed: int, r: int) -> int:
    """Derived seed of replicate ``r`` in a batch experiment under ``seed``."""
    return _rng.word_at(_rng.stream_key(seed, _rng.TAG_REPLICATE), r)


def sample_degrees_fullgraph(params: ModelParams, n: int, l: int, count: int, seed: int,
                             threads: int = 1,
                             pair_budget: int = DEFAULT_PAIR_BUDGET) -> DegreeSampleSet:
    """Node-0 degrees of ``count`` independently sampled graphs.

    Replicate r uses the derived seed ``replicate_seed(seed, r)`` and its
    degree equals ``sample_graph(..., replicate_seed(seed, r)).degrees()[0]``
    realization for realization; only the node-0-incident uniforms and the
    attribute rows are evaluated, which is what makes batches affordable.
    """
    _check_n(n)
    _check_l(l)
    _check_seed(seed)
    _check_count(count)
    if n * (n - 1) // 2 > pair_budget:
        raise BudgetError(f"{n * (n - 1) // 2} node pairs exceed the pair budget of {pair_budget}")

    out = np.empty(count, dtype=np.int64)
    rep_key = _rng.stream_key(seed, _rng.TAG_REPLICATE)
    chunk = max(1, _CHUNK_ELEMS // max(1, n * l))

    def work(i0: int, i1: int) -> None:
        seeds = _rng.words_at(rep_key, np.arange(i0, i1, dtype=np.uint64))
        bits = _attr_bits_for_seed(seeds, n, l, params.mu1)
        words = pack_rows(bits)  # (R, n, W)
        c11 = _popcount(words[:, 0:1, :] & words[:, 1:, :])
        c10 = _popcount(words[:, 0:1, :] ^ words[:, 1:, :])
        log_p = _log_link(c11, c10, l, params)  # (R, n-1)
        pair_keys = _stream_keys(seeds, _rng.TAG_PAIR_UNIF)
        idx = _pair_index(0, np.arange(1, n, dtype=np.int64), n).astype(np.uint64)
        unif = _uniform_matrix(pair_keys, idx)
        out[i0:i1] = (unif <= np.exp(log_p)).sum(axis=1, dtype=np.int64)

    _run_chunks(work, count, chunk, threads)
    return DegreeSampleSet(params=params, n=n, l=l, seed=seed,
                           method=SampleMethod.FULL_GRAPH, degrees=out)


# =====================================================================
# Direct compound-binomial sampling
# =====================================================================

def sample_degrees_direct(params: ModelParams, n: int, l: int, count: int, seed: int,
                          threads: int = 1) -> DegreeSampleSet:
    """``count`` exact draws of D: S ~ Bin(l, mu1), then D ~ Bin(n-1, p_S)."""
    _check_n(n)
    _check_l(l)
    _check_seed(seed)
    _check_count(count)
    c = derive_constants(params)
    key_s = _rng.stream_key(seed, _rng.TAG_DIRECT_S)
    key_u = _rng.stream_key(seed, _rng.TAG_DIRECT_U)
    key_rej = _rng.stream_key(seed, _rng.TAG_DIRECT_REJ)
    m = n - 1
    out = np.empty(count, dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMS // max(1, l))

    def work(i0: int, i1: int) -> None:
        idx = np.arange(i0, i1, dtype=np.uint64)
        bit_idx = (idx[:, None] * np.uint64(l)
                   + np.arange(l, dtype=np.uint64)[None, :])
        bit_u = _rng.uniforms_at(key_s, bit_idx.ravel()).reshape(len(idx), l)
        s = (bit_u < params.mu1).sum(axis=1, dtype=np.int64)
        log_p = s * c.log_gamma1 + (l - s) * c.log_gamma0
        p = np.exp(log_p)
        mean = m * p
        d = np.empty(len(idx), dtype=np.int64)

        inv = mean <= INVERSION_MEAN_MAX
        if inv.any():
            u = _rng.uniforms_at(key_u, idx[inv])
            d[inv] = _binomial_inversion(m, p[inv], u)
        rej = ~inv
        if rej.any():
            for j in np.nonzero(rej)[0]:
                sub = _rng.word_at(key_rej, int(idx[j]))
                gen = np.random.Generator(np.random.PCG64(sub))
                d[j] = gen.binomial(m, p[j])
        out[i0:i1] = d

    _run_chunks(work, count, chunk, threads)
    return DegreeSampleSet(params=params, n=n, l=l, seed=seed,
                           method=SampleMethod.DIRECT, degrees=out)


def _binomial_inversion(m: int, p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Exact binomial quantile at uniforms ``u``: min{k : P(X <= k) >= u}.

    Sequential search from k = 0 with the pmf ratio recurrence; when
    p > 1/2 the complement Bin(m, 1-p) is inverted at 1-u instead, which
    keeps iteration counts at O(mean).  Exact up to double rounding.
    """
    flip = p > 0.5
    p_eff = np.where(flip, 1.0 - p, p)
    u_eff = np.where(flip, 1.0 - u, u)

    pf = np.exp(m * np.log1p(-p_eff))
    cdf = pf.copy()
    k = np.zeros(p.shape, dtype=np.int64)
    odds = p_eff / (1.0 - p_eff)
    active = np.nonzero(cdf < u_eff)[0]
    kk = 0
    while active.size and kk < m:
        ratio = ((m - kk) / (kk + 1.0)) * odds[active]
        pf[active] *= ratio
        cdf[active] += pf[active]
        kk += 1
        k[active] = kk
        still = cdf[active] < u_eff[active]
        # Guard against stalling once the pmf underflows; the residual
        # probability mass at that point is below 1e-300.
        still &= pf[active] > 0.0
        active = active[still]
    return np.where(flip, m - k, k)


def _run_chunks(work, count: int, chunk: int, threads: int) -> None:
    spans = [(i0, min(i0 + chunk, count)) for i0 in range(0, count, chunk)]
    if threads <= 1 or len(spans) <= 1:
        for i0, i1 in spans:
            work(i0, i1)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(work, i0, i1) for i0, i1 in spans]
        for f in futures:
            f.result()


def _check_seed(seed: int) -> None:
    if not (isinstance(seed, int) and 0 <= seed < 2 ** 64):
        raise InvalidParamsError(f"seed must be an integer in [0, 2**64), got {seed!r}")


def _check_count(count: int) -> None:
    if not (isinstance(count, int) and count >= 1):
        raise InvalidParamsError(f"count must be a positive integer, got {count!r}")


# =====================================================================
# Flat-file output
# =====================================================================

def _header_lines(params: ModelParams, n: int, l: int, seed: int, kind: str) -> list[str]:
    return [
        f"# magnet {kind}",
        f"# q11={params.q11!r} q10={params.q10!r} q00={params.q00!r} mu1={params.mu1!r}",
        f"# n={n} l={l} seed={seed}",
    ]


def write_edge_list(graph: MagGraph, target: str | IO[str], header: bool = True) -> None:
    """Edge list: optional '#' header lines, then one ``u<TAB>v`` row per
    edge with u < v, sorted lexicographically."""
    lines: list[str] = []
    if header:
        lines.extend(_header_lines(graph.params, graph.n, graph.l, graph.seed, "edge list"))
    lines.extend(f"{int(u)}\t{int(v)}" for u, v in graph.edges)
    _write_text(target, lines)


def write_attributes(graph: MagGraph, target: str | IO[str]) -> None:
    """Attribute dump: one line per node of l characters '0'/'1'."""
    bits = graph.attribute_matrix()
    lines = ["".join("1" if b else "0" for b in row) for row in bits]
    _write_text(target, lines)


def write_degrees_csv(samples: DegreeSampleSet, target: str | IO[str]) -> None:
    """Degree draws as CSV with provenance headers: one ``degree`` per row."""
    lines = _header_lines(samples.params, samples.n, samples.l, samples.seed,
                          f"degrees method={samples.method.value} count={samples.count}")
    lines.append("degree")
    lines.extend(str(int(d)) for d in samples.degrees)
    _write_text(target, lines)


def _write_text(target: str | IO[str], lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        target.write(text)
