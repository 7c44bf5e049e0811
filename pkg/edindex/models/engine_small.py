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
Small Alphabet Engine

Enumerates every pattern at edit distance one from the query and finds
each one with a weak prefix search, a prefix-sum lookup and a single
constant-time occurrence check. The occurrence check and the
per-pattern search are shared with the centroid engine.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .persistent_base import BinaryReader, BinaryWriter, DataValidationError, PatternTooLongError, PersistentBase
from .poly_hash import (
    EditDescriptor,
    EditKind,
    HashParams,
    QueryHashes,
    find_injective_seed,
    hash_edited_prefix,
    precompute_query_hashes,
)
from .probes import ProbeCounter
from .text_core import IndexCore, RangePair, TextCorpus, build_index_core, compute_left_right
from .weak_prefix import FactorSet, PrefixSum, WeakPrefixIndex, build_factor_set

logger = logging.getLogger("edindex")


@dataclass(frozen=True, slots=True)
class Occurrence:
    """A substring T[start..start+length-1] and the edit of q that spells it"""

    start: int
    length: int
    edit: EditDescriptor


######################################################################
#  Q U E R Y   C O N T E X T
######################################################################
@dataclass
class QueryContext:
    """Per-query scratch: the encoded pattern, its ranges and its hashes"""

    q: List[int]
    left: List[RangePair]
    right: List[RangePair]
    hashes: QueryHashes
    probes: ProbeCounter = field(default_factory=ProbeCounter)
    run_start: List[int] = field(init=False, repr=False)

    def __post_init__(self):
        self.run_start = [0] * len(self.q)
        for i in range(1, len(self.q)):
            same = i > 1 and self.q[i - 1] == self.q[i]
            self.run_start[i] = self.run_start[i - 1] if same else i

    @property
    def m(self) -> int:
        """Length of the pattern"""
        return len(self.q) - 1

    def canonical(self, e: EditDescriptor) -> EditDescriptor:
        """
        The smallest edit spelling the same string as e

        Deleting any symbol of a run, or inserting a symbol anywhere next
        to a run of the same symbol, gives one string.
        """
        if e.kind == EditKind.DELETION:
            return EditDescriptor.deletion(self.run_start[e.pos])
        if e.kind == EditKind.INSERTION and e.pos > 1 and self.q[e.pos - 1] == e.ch:
            return EditDescriptor.insertion(self.run_start[e.pos - 1], e.ch)
        return e


def canonical_matches(occurrences: Iterable[Occurrence]) -> List[Occurrence]:
    """One occurrence per (start, length), with the smallest edit, sorted"""
    best: Dict[Tuple[int, int], Occurrence] = {}
    for occurrence in occurrences:
        key = (occurrence.start, occurrence.length)
        kept = best.get(key)
        if kept is None or occurrence.edit.sort_key < kept.edit.sort_key:
            best[key] = occurrence
    return [best[key] for key in sorted(best)]


######################################################################
#  O C C U R R E N C E   C H E C K
######################################################################
def check_occurrence(
    core: IndexCore,
    left: Sequence[RangePair],
    right: Sequence[RangePair],
    e: EditDescriptor,
    j: int,
    probes: Optional[ProbeCounter] = None,
) -> bool:
    """
    True when the edited pattern occurs at text position j

    The part before the edit is a suffix of the text prefix ending just
    before it, the part after is a prefix of the suffix starting just
    after it, and an inserted or substituted symbol is read directly.
    """
    n = core.n
    m = len(left) - 1
    if j < 1 or j + e.edited_length(m) - 1 > n:
        return False
    reads = 1
    try:
        if e.kind == EditKind.EXACT:
            return core.isa[j] in right[1]
        i = e.pos
        if i > 1:
            reads += 1
            if core.risa[n - (j + i - 2) + 1] not in left[i - 1]:
                return False
        if e.kind == EditKind.DELETION:
            tail_start, tail = j + i - 1, i + 1
        else:
            reads += 1
            if core.text[j + i - 1] != e.ch:
                return False
            tail_start = j + i
            tail = i + 1 if e.kind == EditKind.SUBSTITUTION else i
        if tail <= m:
            reads += 1
            return core.isa[tail_start] in right[tail]
        return True
    finally:
        if probes is not None:
            probes.array_probes += reads


######################################################################
#  S M A L L   E N G I N E
######################################################################
class SmallEngine(PersistentBase):
    """The text core plus the weak prefix search over U and its prefix sums"""

    def __init__(
        self,
        corpus: TextCorpus,
        core: IndexCore,
        params: HashParams,
        b: int,
        wps: WeakPrefixIndex,
        sums: PrefixSum,
    ):
        self.corpus = corpus
        self.core = core
        self.params = params
        self.b = b
        self.wps = wps
        self.sums = sums

    def __repr__(self):
        return f"<SmallEngine n={self.core.n} sigma={self.corpus.sigma} b={self.b}>"

    @property
    def width(self) -> int:
        """Length of the stored factors: b plus room for one insertion"""
        return self.b + 1

    @classmethod
    def build(cls, corpus: TextCorpus, b: int, seed: int = 0, max_retries: int = 32) -> "SmallEngine":
        """Builds the engine with a seed drawn from a generator seeded by seed"""
        if b < 1:
            raise DataValidationError(f"Build parameter b must be positive, got {b}")
        logger.info("Building small engine over %d symbols (sigma=%d, b=%d)", corpus.n, corpus.sigma, b)
        core = build_index_core(corpus)
        factors = build_factor_set(core, b + 1)
        params = find_injective_seed([factors.members], corpus.n, corpus.sigma, np.random.default_rng(seed), max_retries)
        return cls.assemble(corpus, core, params, b, factors)

    @classmethod
    def assemble(cls, corpus: TextCorpus, core: IndexCore, params: HashParams, b: int, factors: FactorSet) -> "SmallEngine":
        """Builds the search structures once the seed is known"""
        return cls(corpus, core, params, b, WeakPrefixIndex.build(factors, params), PrefixSum(factors.counts))

    def prepare(self, pattern: Union[bytes, Sequence[int]], probes: Optional[ProbeCounter] = None) -> QueryContext:
        """Encodes a raw pattern and computes its ranges and hashes"""
        q = self.corpus.encode(pattern)
        if not q:
            raise DataValidationError("Pattern must not be empty")
        if len(q) > self.b:
            raise PatternTooLongError(f"Pattern of length {len(q)} exceeds build parameter b={self.b}")
        left, right = compute_left_right(self.core, q)
        hashes = precompute_query_hashes(self.params, q)
        return QueryContext([0] + list(q), left, right, hashes, probes if probes is not None else ProbeCounter())

    def query_modified_pattern(self, ctx: QueryContext, e: EditDescriptor) -> List[Occurrence]:
        """
        Every suffix prefixed by the edited pattern

        The weak prefix search range is trusted only after the first
        suffix it names passes the occurrence check.
        """
        plen = e.edited_length(ctx.m)
        if plen > self.width:
            raise PatternTooLongError(f"Edited pattern of length {plen} exceeds {self.width}")
        if plen < 1:
            return []
        first, last = self.wps.query(lambda j: hash_edited_prefix(ctx.hashes, e, j), plen, ctx.probes)
        low, high = self.sums.range(first, last)
        sa = self.core.sa
        ctx.probes.array_probes += 1
        if not check_occurrence(self.core, ctx.left, ctx.right, e, sa[low], ctx.probes):
            return []
        edit = ctx.canonical(e)
        ctx.probes.reported += high - low + 1
        return [Occurrence(sa[rank], plen, edit) for rank in range(low, high + 1)]

    def candidates(self, ctx: QueryContext) -> Iterable[EditDescriptor]:
        """Every edit worth searching, deletions first, then substitutions, then insertions"""
        q, m, sigma = ctx.q, ctx.m, self.corpus.sigma
        yield EditDescriptor.exact()
        if m > 1:
            for i in range(1, m + 1):
                if ctx.run_start[i] == i:
                    yield EditDescriptor.deletion(i)
        for i in range(1, m + 1):
            for ch in range(1, sigma + 1):
                if ch != q[i]:
                    yield EditDescriptor.substitution(i, ch)
        for i in range(1, m + 2):
            for ch in range(1, sigma + 1):
                if i == 1 or q[i - 1] != ch:
                    yield EditDescriptor.insertion(i, ch)

    def query(self, pattern: Union[bytes, Sequence[int]], probes: Optional[ProbeCounter] = None) -> List[Occurrence]:
        """Every substring within edit distance one of pattern"""
        ctx = self.prepare(pattern, probes)
        found: List[Occurrence] = []
        for e in self.candidates(ctx):
            found.extend(self.query_modified_pattern(ctx, e))
        matches = canonical_matches(found)
        logger.debug("Small engine: %d match(es) for a pattern of length %d", len(matches), ctx.m)
        return matches

    def serialize(self, writer: BinaryWriter) -> None:
        self.core.serialize(writer)
        self.wps.serialize(writer)
        self.sums.serialize(writer)

    @classmethod
    def deserialize(cls, reader: BinaryReader, corpus: TextCorpus = None, params: HashParams = None, b: int = 0):
        core = IndexCore.deserialize(reader, corpus.codes)
        wps = WeakPrefixIndex.deserialize(reader)
        sums = PrefixSum.deserialize(reader)
        return cls(corpus, core, params, b, wps, sums)


def query_one_error_small(engine: SmallEngine, pattern: Union[bytes, Sequence[int]]) -> List[Occurrence]:
    """Every substring within edit distance one, by exhaustive enumeration"""
    return engine.query(pattern)
