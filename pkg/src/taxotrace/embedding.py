"""Text-to-vector embedding backends and vector similarity.

The classifier never talks to a model directly; it goes through a provider
selected by :class:`EmbeddingProviderConfig`. Three kinds exist: a seeded
deterministic mock (n-gram hashing, for tests and offline runs), a binary
file cache of precomputed vectors, and a minimal HTTP protocol for real
embedding servers.
"""

from __future__ import annotations

import hashlib
import struct
import time
import zlib
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import httpx
import numpy as np

CACHE_MAGIC = b"TTEC"
CACHE_VERSION = 1

PROVIDER_KINDS = ("deterministic-mock", "file-cache", "http")


class EmbeddingError(Exception):
    """Base class for embedding failures."""


class DimensionMismatchError(EmbeddingError):
    pass


class CacheMissError(EmbeddingError):
    pass


class CacheCorruptError(EmbeddingError):
    pass


class TransportError(EmbeddingError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A fixed-length float64 vector tagged with its producing backend."""

    values: np.ndarray
    model_id: str

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    """Which backend to use and what it must produce.

    kind=http requires endpoint, kind=file-cache requires cache_path;
    dimension is the contract every returned vector is checked against.
    """

    kind: str
    dimension: int
    model_id: str
    endpoint: str | None = None
    cache_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PROVIDER_KINDS:
            raise ValueError(f"unknown provider kind {self.kind!r}; expected one of {PROVIDER_KINDS}")
        if self.dimension <= 0:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if self.kind == "http" and not self.endpoint:
            raise ValueError("http provider requires an endpoint")
        if self.kind == "file-cache" and not self.cache_path:
            raise ValueError("file-cache provider requires a cache_path")


def cosine_similarity(a, b) -> float:
    """dot(a,b) / (|a|·|b|), clamped to [-1, 1].

    Accepts EmbeddingVector or any array-like; inputs must share a
    dimension and neither may be all-zero.
    """
    va = np.asarray(getattr(a, "values", a), dtype=np.float64)
    vb = np.asarray(getattr(b, "values", b), dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionMismatchError(f"cosine of shapes {va.shape} and {vb.shape}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity of a zero-norm vector is undefined")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


def content_key(model_id: str, text: str) -> bytes:
    """32-byte cache key: content hash of the input text plus the model id."""
    h = hashlib.sha256()
    h.update(model_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(text.encode("utf-8"))
    return h.digest()


# -- providers ------------------------------------------------------------


class EmbeddingProvider:
    """Base backend; subclasses implement `_embed_one`."""

    def __init__(self, config: EmbeddingProviderConfig):
        self.config = config

    @property
    def model_id(self) -> str:
        return self.config.model_id

    @property
    def dimension(self) -> int:
        return self.config.dimension

    def embed(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        values = self._embed_one(text)
        if values.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"{self.model_id}: backend produced {values.shape[0]} values, "
                f"configured dimension is {self.dimension}"
            )
        return EmbeddingVector(values=values, model_id=self.model_id)

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        """Order-preserving batch embed; first failure carries its index."""
        out = []
        for i, text in enumerate(texts):
            try:
                out.append(self.embed(text))
            except (EmbeddingError, ValueError) as exc:
                raise exc.__class__(f"texts[{i}]: {exc}") from exc
        return out

    def _embed_one(self, text: str) -> np.ndarray:
        raise NotImplementedError


@lru_cache(maxsize=65536)
def _gram_digest(gram: str, key: bytes) -> bytes:
    return hashlib.blake2b(gram.encode("utf-8"), digest_size=16, key=key).digest()


class DeterministicMockProvider(EmbeddingProvider):
    """Seeded hash of character trigrams, L2-normalized.

    Same text always yields the same vector; shared trigrams push cosine
    up, so rankings over the mock are meaningful rather than arbitrary.
    """

    _NGRAM = 3

    def __init__(self, config: EmbeddingProviderConfig):
        super().__init__(config)
        self._key = f"{config.model_id}:{config.seed}".encode("utf-8")[:64]

    def _embed_one(self, text: str) -> np.ndarray:
        acc = np.zeros(self.dimension, dtype=np.float64)
        padded = f"\x02{text}\x03"
        for i in range(len(padded) - self._NGRAM + 1):
            digest = _gram_digest(padded[i : i + self._NGRAM], self._key)
            idx = int.from_bytes(digest[:8], "little") % self.dimension
            # 53-bit weights keep distinct trigram multisets from ever
            # accumulating to the same vector, unlike plain signed counts.
            weight = 0.5 + int.from_bytes(digest[8:15], "little") / 2**56
            acc[idx] += weight if digest[15] & 1 else -weight
        norm = np.linalg.norm(acc)
        if norm == 0.0:
            # Signed weights cancelled out; fall back to one whole-text bucket.
            digest = _gram_digest(padded, self._key)
            acc[int.from_bytes(digest[:8], "little") % self.dimension] = 1.0
            norm = 1.0
        return acc / norm


class FileCacheProvider(EmbeddingProvider):
    """Serves vectors from a binary cache file; unknown text is an error."""

    def __init__(self, config: EmbeddingProviderConfig):
        super().__init__(config)
        dimension, entries = read_cache(config.cache_path)
        if dimension != config.dimension:
            raise DimensionMismatchError(
                f"cache {config.cache_path} holds {dimension}-dim vectors, "
                f"configured dimension is {config.dimension}"
            )
        self._entries = entries

    def _embed_one(self, text: str) -> np.ndarray:
        key = content_key(self.model_id, text)
        try:
            return self._entries[key]
        except KeyError:
            raise CacheMissError(
                f"no cached vector for model {self.model_id!r}, "
                f"text {text[:40]!r}..."
            ) from None


class HttpProvider(EmbeddingProvider):
    """POSTs {endpoint}/embed with a minimal JSON batch protocol."""

    def __init__(
        self,
        config: EmbeddingProviderConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        retries: int = 3,
        timeout: float = 30.0,
        chunk_size: int = 64,
    ):
        super().__init__(config)
        self._transport = transport
        self._retries = retries
        self._timeout = timeout
        self._chunk_size = chunk_size

    def _embed_one(self, text: str) -> np.ndarray:
        return self._request([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        for i, text in enumerate(texts):
            if not text or not text.strip():
                raise ValueError(f"texts[{i}]: cannot embed empty text")
        vectors: list[EmbeddingVector] = []
        for start in range(0, len(texts), self._chunk_size):
            chunk = texts[start : start + self._chunk_size]
            for offset, values in enumerate(self._request(list(chunk))):
                if values.shape != (self.dimension,):
                    raise DimensionMismatchError(
                        f"texts[{start + offset}]: backend produced "
                        f"{values.shape[0]} values, configured dimension is {self.dimension}"
                    )
                vectors.append(EmbeddingVector(values=values, model_id=self.model_id))
        return vectors

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        url = self.config.endpoint.rstrip("/") + "/embed"
        payload = {"model": self.model_id, "texts": texts}
        last_error: Exception | None = None
        for attempt in range(self._retries):
            try:
                with httpx.Client(transport=self._transport, timeout=self._timeout) as client:
                    response = client.post(url, json=payload)
                if response.status_code != 200:
                    raise TransportError(f"{url} returned status {response.status_code}")
                body = response.json()
                vectors = body["vectors"]
                if not isinstance(vectors, list) or len(vectors) != len(texts):
                    raise TransportError(
                        f"{url} returned {len(vectors) if isinstance(vectors, list) else 'no'} "
                        f"vectors for {len(texts)} texts"
                    )
                return [np.asarray(v, dtype=np.float64) for v in vectors]
            except (httpx.HTTPError, TransportError, KeyError, ValueError, TypeError) as exc:
                last_error = exc
                if attempt + 1 < self._retries:
                    time.sleep(0.1 * 2**attempt)
        raise TransportError(
            f"embedding endpoint {url} failed after {self._retries} attempts: {last_error}"
        ) from last_error


def create_provider(config: EmbeddingProviderConfig, **kwargs) -> EmbeddingProvider:
    if config.kind == "deterministic-mock":
        return DeterministicMockProvider(config)
    if config.kind == "file-cache":
        return FileCacheProvider(config)
    return HttpProvider(config, **kwargs)


# -- binary vector cache ----------------------------------------------------
#
# Layout (little-endian): magic "TTEC", version u16, dimension u32,
# entry count u64, then per entry a 32-byte key followed by dimension
# f64 values, and finally a CRC-32 of everything before it.

_HEADER = struct.Struct("<4sHIQ")


def write_cache(cache_path: str | Path, dimension: int, entries: Mapping[bytes, np.ndarray]) -> None:
    """Persist vectors keyed by 32-byte content hashes; see `content_key`."""
    body = bytearray()
    body += _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, dimension, len(entries))
    for key, values in entries.items():
        if len(key) != 32:
            raise ValueError(f"cache keys must be 32 bytes, got {len(key)}")
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (dimension,):
            raise DimensionMismatchError(
                f"cache entry has shape {arr.shape}, expected ({dimension},)"
            )
        body += key
        body += arr.astype("<f8").tobytes()
    body += struct.pack("<I", zlib.crc32(bytes(body)))
    Path(cache_path).write_bytes(bytes(body))


def read_cache(cache_path: str | Path) -> tuple[int, dict[bytes, np.ndarray]]:
    """Load a cache file, verifying magic, version, and checksum."""
    blob = Path(cache_path).read_bytes()
    if len(blob) < _HEADER.size + 4:
        raise CacheCorruptError(f"{cache_path}: file too short to be a vector cache")
    magic, version, dimension, count = _HEADER.unpack_from(blob, 0)
    if magic != CACHE_MAGIC:
        raise CacheCorruptError(f"{cache_path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CacheCorruptError(
            f"{cache_path}: cache version {version} unsupported (expected {CACHE_VERSION})"
        )
    body, checksum = blob[:-4], struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(body) != checksum:
        raise CacheCorruptError(f"{cache_path}: checksum mismatch, file is corrupt")
    record = 32 + 8 * dimension
    expected = _HEADER.size + count * record
    if len(body) != expected:
        raise CacheCorruptError(
            f"{cache_path}: expected {expected} body bytes for {count} entries, got {len(body)}"
        )
    entries: dict[bytes, np.ndarray] = {}
    offset = _HEADER.size
    for _ in range(count):
        key = body[offset : offset + 32]
        values = np.frombuffer(body, dtype="<f8", count=dimension, offset=offset + 32)
        entries[bytes(key)] = values.astype(np.float64)
        offset += record
    return dimension, entries


def build_cache(
    cache_path: str | Path,
    provider: EmbeddingProvider,
    texts: Iterable[str],
) -> int:
    """Embed texts through a provider and persist them; returns entry count."""
    entries: dict[bytes, np.ndarray] = {}
    for text in texts:
        vec = provider.embed(text)
        entries[content_key(provider.model_id, text)] = vec.values
    write_cache(cache_path, provider.dimension, entries)
    return len(entries)
