"""k-Orthogonal-Vectors backend.

An instance is k sets of 0/1 vectors of dimension d.  A tuple
``(i_1, ..., i_k)`` is orthogonal when ``sum_l prod_s U_s[i_s][l] == 0``
over the integers, i.e. no coordinate is 1 in every chosen vector.  Vectors
are packed into uint64 words, so the test is an AND-accumulate.

Op counts are abstract coordinate products: a full enumeration costs
``prod(sizes) * d`` regardless of how many words the packing needs.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from ..base import FULL, OpCount, SpotCheck
from ..errors import DimensionMismatch

_HEADER = b"kov1"


def _pack(bits: np.ndarray) -> np.ndarray:
    """(n, d) 0/1 array -> (n, ceil(d/64)) uint64 words."""
    n, d = bits.shape
    words = max(1, -(-d // 64))
    padded = np.zeros((n, words * 64), dtype=np.uint8)
    padded[:, :d] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").reshape(n, words)


@dataclass(frozen=True, eq=False)
class KovInstance:
    sets: tuple

    def __post_init__(self):
        arrays = []
        for s in self.sets:
            a = np.array(s, dtype=np.uint8)
            if a.ndim != 2:
                raise DimensionMismatch("each set must be a 2-d array of vectors")
            if a.size and a.max() > 1:
                raise ValueError("vectors must be 0/1 valued")
            a.setflags(write=False)
            arrays.append(a)
        if len(arrays) < 2:
            raise ValueError("k must be at least 2")
        dims = {a.shape[1] for a in arrays}
        if len(dims) != 1:
            raise DimensionMismatch("all vectors must share one dimension")
        object.__setattr__(self, "sets", tuple(arrays))
        if self.d == 0 or any(n == 0 for n in self.sizes):
            raise ValueError("k*n*d must be positive")

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def d(self) -> int:
        return self.sets[0].shape[1]

    @property
    def sizes(self) -> tuple:
        return tuple(a.shape[0] for a in self.sets)

    @property
    def n(self) -> int:
        """Size of the first set (all sets are equal unless partitioned)."""
        return self.sizes[0]

    @property
    def tuple_count(self) -> int:
        return math.prod(self.sizes)

    @property
    def enumeration_ops(self) -> int:
        return self.tuple_count * self.d

    @cached_property
    def packed(self) -> tuple:
        return tuple(_pack(a) for a in self.sets)

    def to_bytes(self) -> bytes:
        parts = [_HEADER, self.k.to_bytes(4, "big"), self.d.to_bytes(4, "big")]
        for a in self.sets:
            parts.append(a.shape[0].to_bytes(4, "big"))
            parts.append(np.packbits(a, axis=1).tobytes())
        return b"".join(parts)

    @cached_property
    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()

    def __eq__(self, other):
        return isinstance(other, KovInstance) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.digest)


def random_kov_instance(k: int, n: int, d: int, density: float = 0.5, rng=None) -> KovInstance:
    rng = np.random.default_rng(rng)
    return KovInstance(tuple((rng.random((n, d)) < density).astype(np.uint8) for _ in range(k)))


@dataclass(frozen=True)
class KovProof:
    tuples: tuple
    claimed_complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "tuples", tuple(tuple(int(i) for i in t) for t in self.tuples))

    def to_bytes(self) -> bytes:
        k = len(self.tuples[0]) if self.tuples else 0
        out = bytearray([1 if self.claimed_complete else 0, k])
        out += len(self.tuples).to_bytes(4, "big")
        for t in self.tuples:
            for i in t:
                out += i.to_bytes(4, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, k: int) -> "KovProof":
        """Strict decoder; any malformed field raises ValueError."""
        if len(data) < 6:
            raise ValueError("truncated k-OV proof")
        flag, kk = data[0], data[1]
        if flag not in (0, 1):
            raise ValueError("bad completeness flag")
        count = int.from_bytes(data[2:6], "big")
        if (kk != k) if count else (kk not in (0, k)):
            raise ValueError("tuple arity does not match the instance")
        if len(data) != 6 + 4 * k * count:
            raise ValueError("proof length does not match tuple count")
        body = np.frombuffer(data, dtype=">u4", offset=6).reshape(count, k) if count else ()
        return cls(tuple(tuple(int(x) for x in row) for row in body), bool(flag))


class KovMemo:
    """Cache of per-row results keyed by (row bits, remaining sets).

    Solving a second instance that shares U_1 rows and the other sets with
    an already solved one skips those rows entirely, which is exactly the
    amortization a Block Task should not allow.
    """

    def __init__(self):
        self._rows = {}
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._rows)

    def get(self, key):
        value = self._rows.get(key)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, key, value):
        self._rows[key] = value


def _rest_product(instance: KovInstance):
    """AND-product of sets 2..k with C-ordered index tuples."""
    packed = instance.packed
    acc = packed[1]
    for p in packed[2:]:
        acc = (acc[:, None, :] & p[None, :, :]).reshape(-1, acc.shape[1])
    return acc


def _rest_key(instance: KovInstance) -> bytes:
    h = hashlib.sha256()
    for a in instance.sets[1:]:
        h.update(a.shape[0].to_bytes(4, "big"))
        h.update(np.packbits(a, axis=1).tobytes())
    return h.digest()


def orthogonal_tuples(instance: KovInstance, counter: OpCount | None = None, memo: KovMemo | None = None,
                      max_rows: int | None = None) -> np.ndarray:
    """All orthogonal tuples as an (m, k) array in lexicographic order."""
    rest = _rest_product(instance)
    rest_shape = instance.sizes[1:]
    row_ops = rest.shape[0] * instance.d
    rest_key = _rest_key(instance) if memo is not None else None
    first = instance.packed[0]
    rows_bits = np.packbits(instance.sets[0], axis=1) if memo is not None else None
    chunks = []
    limit = first.shape[0] if max_rows is None else min(max_rows, first.shape[0])
    for i in range(limit):
        hits = None
        if memo is not None:
            key = (rows_bits[i].tobytes(), rest_key)
            hits = memo.get(key)
        if hits is None:
            hits = np.flatnonzero(~(rest & first[i]).any(axis=1))
            if counter is not None:
                counter.add(row_ops)
            if memo is not None:
                memo.put(key, hits)
        if hits.size:
            idx = np.unravel_index(hits, rest_shape)
            block = np.empty((hits.size, instance.k), dtype=np.int64)
            block[:, 0] = i
            for s, col in enumerate(idx, start=1):
                block[:, s] = col
            chunks.append(block)
    if not chunks:
        return np.empty((0, instance.k), dtype=np.int64)
    return np.concatenate(chunks)


def kov_solve(instance: KovInstance, seed=None, budget: int | None = None, memo: KovMemo | None = None):
    """Full enumeration; returns ``(proof, ops)`` with ``proof=None`` if the budget runs out."""
    counter = OpCount()
    if budget is not None and instance.enumeration_ops > budget:
        rows = int(budget) // (instance.enumeration_ops // instance.n)
        orthogonal_tuples(instance, counter, memo=memo, max_rows=rows)
        return None, counter.ops
    found = orthogonal_tuples(instance, counter, memo=memo)
    return KovProof(tuple(map(tuple, found.tolist())), claimed_complete=True), counter.ops


def is_orthogonal(instance: KovInstance, tup) -> bool:
    words = instance.packed[0][tup[0]]
    for s in range(1, instance.k):
        words = words & instance.packed[s][tup[s]]
    return not words.any()


def _well_formed(instance: KovInstance, proof: KovProof) -> bool:
    sizes = instance.sizes
    prev = None
    for t in proof.tuples:
        if len(t) != instance.k or any(not 0 <= i < n for i, n in zip(t, sizes)):
            return False
        if prev is not None and not prev < t:
            return False
        prev = t
    return True


def _spot_seed(proof: KovProof) -> int:
    return int.from_bytes(hashlib.sha256(proof.to_bytes()).digest()[:8], "big")


def kov_verify(instance: KovInstance, proof: KovProof, mode=FULL, counter: OpCount | None = None) -> bool:
    """Full mode re-enumerates when completeness is claimed; SpotCheck samples tuples."""
    if not _well_formed(instance, proof):
        return False
    counter = counter if counter is not None else OpCount()
    tuples = proof.tuples
    if isinstance(mode, SpotCheck):
        if not tuples:
            return True
        m = math.ceil(mode.fraction * len(tuples))
        seed = _spot_seed(proof) if mode.seed is None else mode.seed
        picks = np.random.default_rng(seed).choice(len(tuples), size=m, replace=False)
        counter.add(m * instance.d)
        return all(is_orthogonal(instance, tuples[i]) for i in sorted(picks.tolist()))
    if proof.claimed_complete:
        expected = orthogonal_tuples(instance, counter)
        return len(expected) == len(tuples) and all(
            tuple(row) == t for row, t in zip(expected.tolist(), tuples)
        )
    counter.add(len(tuples) * instance.d)
    return all(is_orthogonal(instance, t) for t in tuples)


def kov_batch(instances) -> KovInstance:
    """Concatenate set-wise; the batched tuple space contains every input's tuples."""
    instances = list(instances)
    if not instances:
        raise ValueError("nothing to batch")
    k, d = instances[0].k, instances[0].d
    if any(inst.k != k or inst.d != d for inst in instances):
        raise DimensionMismatch("batched instances must share k and d")
    return KovInstance(tuple(np.vstack([inst.sets[s] for inst in instances]) for s in range(k)))


def kov_partition(instance: KovInstance, parts: int) -> list:
    """Split U_1 into ``parts`` equal row blocks; the other sets are shared."""
    if parts < 1 or instance.n % parts:
        raise DimensionMismatch(f"{parts} parts do not divide |U_1| = {instance.n}")
    step = instance.n // parts
    return [
        KovInstance((instance.sets[0][i * step:(i + 1) * step],) + instance.sets[1:])
        for i in range(parts)
    ]


def kov_merge(proofs, block_sizes) -> KovProof:
    """Union of partition solutions with U_1 offsets restored."""
    merged = []
    offset = 0
    for proof, size in zip(proofs, block_sizes):
        merged.extend((t[0] + offset,) + tuple(t[1:]) for t in proof.tuples)
        offset += size
    return KovProof(tuple(sorted(merged)), all(p.claimed_complete for p in proofs))


def _icbrt(c: int) -> int:
    n = int(round(c ** (1.0 / 3.0)))
    while n**3 > c:
        n -= 1
    while (n + 1) ** 3 <= c:
        n += 1
    return n


def kov_dimension_for_budget(flops: float, seconds: float) -> int:
    """Largest n with n**3 <= flops * seconds (square matrices, d = n).

    Mirrors a deliberately optimistic sizing argument: a cubic-time
    multiplication-style solve, and FLOPS taken at face value.
    """
    if flops <= 0 or seconds <= 0:
        raise ValueError("flops and seconds must be positive")
    return _icbrt(math.floor(flops * seconds))


def format_kov(instance: KovInstance) -> str:
    if len(set(instance.sizes)) != 1:
        raise DimensionMismatch("file format needs equal set sizes")
    lines = [f"{instance.k} {instance.n} {instance.d}"]
    for a in instance.sets:
        lines.extend("".join("1" if b else "0" for b in row) for row in a)
    return "\n".join(lines) + "\n"


def parse_kov(text: str) -> KovInstance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty k-OV file")
    try:
        k, n, d = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError("line 1: header must be 'k n d'") from None
    body = lines[1:]
    if len(body) != k * n:
        raise ValueError(f"expected {k * n} vector lines, found {len(body)}")
    rows = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != d or set(row) - {"0", "1"}:
            raise ValueError(f"line {lineno}: expected {d} characters in {{0,1}}")
        rows.append([c == "1" for c in row])
    data = np.array(rows, dtype=np.uint8).reshape(k, n, d)
    return KovInstance(tuple(data[s] for s in range(k)))


def read_kov(path) -> KovInstance:
    return parse_kov(Path(path).read_text())


def write_kov(instance: KovInstance, path) -> None:
    Path(path).write_text(format_kov(instance))
