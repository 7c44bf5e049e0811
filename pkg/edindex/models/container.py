######################################################################
# Copyright 2024 The edindex Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
######################################################################

"""
Index Container

On-disk layout, little-endian throughout:

    magic "ED1X" | u32 version | u32 flags | u64 n | u32 sigma | u32 b
    u64 P | u64 r | u32 is_bytes | alphabet | codes | engine body
    u64 checksum (8-byte blake2b of everything before it)

The suffix tree and its centroid paths are rebuilt on load.
"""
import hashlib
import logging
import struct
from enum import IntFlag
from pathlib import Path
from typing import List, Optional, Sequence, Union

from .centroid_engine import CentroidEngine
from .engine_small import Occurrence, SmallEngine
from .persistent_base import BinaryReader, BinaryWriter, CorruptIndexError, DataValidationError
from .poly_hash import HashParams
from .probes import ProbeCounter
from .text_core import TextCorpus

logger = logging.getLogger("edindex")

MAGIC = b"ED1X"
VERSION = 1
ENGINES = ("small", "large", "both")


class EngineFlags(IntFlag):
    """Engines an index was built for"""

    SMALL = 1
    LARGE = 2
    BOTH = 3

    @classmethod
    def from_name(cls, name: str) -> "EngineFlags":
        """Maps small, large or both to its flags"""
        try:
            return cls[name.upper()]
        except KeyError as error:
            raise DataValidationError(f"Unknown engine '{name}', expected one of {', '.join(ENGINES)}") from error


def checksum(data: bytes) -> int:
    """64-bit blake2b digest of data, as an integer"""
    return struct.unpack("<Q", hashlib.blake2b(data, digest_size=8).digest())[0]


class IndexContainer:
    """A built index and the engines it can answer with"""

    def __init__(self, flags: EngineFlags, engine: Union[SmallEngine, CentroidEngine]):
        self.flags = flags
        self.engine = engine

    def __repr__(self):
        return f"<IndexContainer flags={self.flags.name} n={self.corpus.n} b={self.b}>"

    @property
    def small(self) -> SmallEngine:
        """The exhaustive engine; every build carries its structures"""
        return self.engine.small if isinstance(self.engine, CentroidEngine) else self.engine

    @property
    def large(self) -> CentroidEngine:
        """The centroid engine"""
        if not isinstance(self.engine, CentroidEngine):
            raise DataValidationError("Index was built without the large engine")
        return self.engine

    @property
    def corpus(self) -> TextCorpus:
        """The indexed text"""
        return self.small.corpus

    @property
    def params(self) -> HashParams:
        """The hash modulus and seed"""
        return self.small.params

    @property
    def b(self) -> int:
        """Longest pattern accepted"""
        return self.small.b

    @classmethod
    def build(cls, corpus: TextCorpus, b: int, engine: str = "both", seed: int = 0, max_retries: int = 32):
        """Builds the structures the named engine needs"""
        flags = EngineFlags.from_name(engine)
        if flags & EngineFlags.LARGE:
            return cls(flags, CentroidEngine.build(corpus, b, seed, max_retries))
        return cls(flags, SmallEngine.build(corpus, b, seed, max_retries))

    def resolve(self, engine: Optional[str] = None):
        """The engine answering queries: large when built, unless small is asked for"""
        flags = EngineFlags.from_name(engine) if engine else self.flags
        if flags == EngineFlags.SMALL:
            return self.small
        if flags == EngineFlags.LARGE:
            return self.large
        return self.engine

    def query(
        self, pattern: Union[bytes, Sequence[int]], engine: Optional[str] = None, probes: Optional[ProbeCounter] = None
    ) -> List[Occurrence]:
        """Every substring within edit distance one of pattern"""
        return self.resolve(engine).query(pattern, probes)

    def validate_pattern(self, pattern: Union[bytes, Sequence[int]]) -> None:
        """Raises DataValidationError for a pattern no engine of this index can answer"""
        self.small.prepare(pattern)

    ######################################################################
    #  S E R I A L I Z A T I O N
    ######################################################################
    def to_bytes(self) -> bytes:
        """The container, checksum included"""
        corpus, params = self.corpus, self.params
        writer = BinaryWriter()
        writer.raw(MAGIC)
        writer.u32(VERSION)
        writer.u32(self.flags)
        writer.u64(corpus.n)
        writer.u32(corpus.sigma)
        writer.u32(self.b)
        writer.u64(params.modulus)
        writer.u64(params.seed)
        writer.u32(1 if corpus.is_bytes else 0)
        writer.array(corpus.alphabet)
        writer.array(corpus.codes[1:])
        self.engine.serialize(writer)
        body = writer.getvalue()
        return body + struct.pack("<Q", checksum(body))

    @classmethod
    def from_bytes(cls, data: bytes) -> "IndexContainer":
        """Reads a container back, rejecting anything damaged"""
        if len(data) < len(MAGIC) + 8 or data[: len(MAGIC)] != MAGIC:
            raise CorruptIndexError("Not an index container (bad magic)")
        body, trailer = data[:-8], data[-8:]
        if struct.unpack("<Q", trailer)[0] != checksum(body):
            raise CorruptIndexError("Index checksum mismatch")
        reader = BinaryReader(body)
        reader.raw(len(MAGIC))
        version = reader.u32()
        if version != VERSION:
            raise CorruptIndexError(f"Unsupported index version {version}")
        try:
            flags = EngineFlags(reader.u32())
            if flags not in (EngineFlags.SMALL, EngineFlags.LARGE, EngineFlags.BOTH):
                raise CorruptIndexError(f"Unknown engine flags {int(flags)}")
            n, sigma, b = reader.u64(), reader.u32(), reader.u32()
            params = HashParams(reader.u64(), reader.u64())
            is_bytes = reader.u32() == 1
            alphabet, codes = reader.array(), reader.array()
            if len(codes) != n or len(alphabet) != sigma:
                raise CorruptIndexError("Header disagrees with the stored text")
            corpus = TextCorpus.from_codes(alphabet, [0] + codes, is_bytes)
            if flags & EngineFlags.LARGE:
                engine = CentroidEngine.deserialize(reader, corpus, params, b)
            else:
                engine = SmallEngine.deserialize(reader, corpus, params, b)
        except CorruptIndexError:
            raise
        except (DataValidationError, ValueError, IndexError, KeyError) as error:
            raise CorruptIndexError(f"Index body is malformed: {error}") from error
        if not reader.at_end():
            raise CorruptIndexError(f"Trailing bytes after offset {reader.offset}")
        return cls(flags, engine)

    def save(self, path: Union[str, Path]) -> int:
        """Writes the container to path and returns its size"""
        data = self.to_bytes()
        Path(path).write_bytes(data)
        logger.info("Saved %s to %s (%d bytes)", self, path, len(data))
        return len(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "IndexContainer":
        """Reads a container from path"""
        container = cls.from_bytes(Path(path).read_bytes())
        logger.info("Loaded %s from %s", container, path)
        return container

    def inject_fault(self) -> None:
        """Reverses the suffix array in place, for harness self-checks"""
        sa = self.small.core.sa
        sa[1:] = sa[:0:-1]
        logger.warning("Fault injected into the suffix array of %s", self)
