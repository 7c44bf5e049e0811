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
Weak Prefix Search

A sorted set of fixed-width strings is indexed by the compacted trie of
its members. Each trie node is stored in a hash map under the hashes of
a few of its prefixes, the ones a fat binary search over prefix lengths
can ask for. A query that prefixes some member gets the exact member
range back; any other query gets an arbitrary range.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .persistent_base import BinaryReader, BinaryWriter, DataValidationError, PersistentBase
from .poly_hash import HashParams
from .probes import ProbeCounter
from .text_core import SENTINEL, IndexCore, build_lcp_intervals

logger = logging.getLogger("edindex")


######################################################################
#  F A C T O R   S E T
######################################################################
@dataclass
class FactorSet:
    """Sorted distinct strings of one width, with the number of suffixes each stands for"""

    width: int
    members: List[Tuple[int, ...]]
    counts: List[int]

    def __len__(self):
        return len(self.members)

    @property
    def total(self) -> int:
        """Number of suffixes represented"""
        return sum(self.counts)


def build_factor_set(core: IndexCore, width: int) -> FactorSet:
    """
    The distinct width-long factors of T followed by width - 1 sentinels

    Walking the suffix array yields them already sorted, one run of equal
    padded prefixes per member.
    """
    if width < 1:
        raise DataValidationError(f"Factor width must be positive, got {width}")
    padded = core.text + [SENTINEL] * (width - 1)
    members: List[Tuple[int, ...]] = []
    counts: List[int] = []
    for rank in range(1, core.n + 1):
        if rank > 1 and core.lcp[rank] >= width:
            counts[-1] += 1
            continue
        start = core.sa[rank]
        members.append(tuple(padded[start : start + width]))
        counts.append(1)
    return FactorSet(width, members, counts)


def group_sorted(width: int, keys: Sequence[Tuple[int, ...]]) -> FactorSet:
    """Collapses a sorted list of width-long keys into a FactorSet"""
    members: List[Tuple[int, ...]] = []
    counts: List[int] = []
    for key in keys:
        if members and members[-1] == key:
            counts[-1] += 1
        else:
            members.append(key)
            counts.append(1)
    return FactorSet(width, members, counts)


######################################################################
#  P R E F I X   S U M S
######################################################################
class PrefixSum(PersistentBase):
    """Cumulative member counts, mapping member ranges onto represented ranks"""

    def __init__(self, counts: Sequence[int]):
        self.counts = list(counts)
        self.cumulative = [0] * (len(self.counts) + 1)
        for index, count in enumerate(self.counts, start=1):
            self.cumulative[index] = self.cumulative[index - 1] + count

    def __len__(self):
        return len(self.counts)

    @property
    def total(self) -> int:
        """Number of ranks covered"""
        return self.cumulative[-1]

    def range(self, first: int, last: int) -> Tuple[int, int]:
        """Ranks represented by members first..last"""
        if not 1 <= first <= last <= len(self.counts):
            raise DataValidationError(f"Member range [{first}, {last}] outside 1..{len(self.counts)}")
        return self.cumulative[first - 1] + 1, self.cumulative[last]

    def serialize(self, writer: BinaryWriter) -> None:
        writer.array(self.counts)

    @classmethod
    def deserialize(cls, reader: BinaryReader) -> "PrefixSum":
        return cls(reader.array())


######################################################################
#  W E A K   P R E F I X   S E A R C H
######################################################################
def two_fattest(lo: int, hi: int) -> int:
    """The number in [lo, hi] divisible by the largest power of two (lo >= 1)"""
    if lo >= hi:
        return hi
    shift = ((lo - 1) ^ hi).bit_length() - 1
    return (hi >> shift) << shift


class WeakPrefixIndex(PersistentBase):
    """
    Trie nodes keyed by (prefix length, prefix hash)

    A node with string depth d whose parent has depth p is stored under
    every length that is, for some l in (p, d], the 2-fattest number of
    (p, l]. Those are at most log2(width) + 1 keys per node.
    """

    def __init__(self, width: int, depth: List[int], lo: List[int], hi: List[int], keys: Dict[Tuple[int, int], int]):
        self.width = width
        self.depth = depth
        self.lo = lo
        self.hi = hi
        self.keys = keys

    def __len__(self):
        return self.hi[0] if self.hi else 0

    @classmethod
    def build(cls, factors: FactorSet, params: HashParams) -> "WeakPrefixIndex":
        """Builds the trie over the members and files every node under its keys"""
        members = factors.members
        if not members:
            raise DataValidationError("Cannot index an empty member set")
        count = len(members)
        lcp = [0, 0]
        for k in range(1, count):
            previous, current = members[k - 1], members[k]
            length = 0
            while length < factors.width and previous[length] == current[length]:
                length += 1
            lcp.append(length)
        tree = build_lcp_intervals(lcp, [factors.width] * (count + 1))
        modulus, seed = params.modulus, params.seed
        keys: Dict[Tuple[int, int], int] = {}
        hashes: Dict[int, List[int]] = {}
        for node in range(1, len(tree.depth)):
            first = tree.lo[node]
            if first not in hashes:
                running, value, power = [0], 0, 1
                for code in members[first - 1]:
                    power = power * seed % modulus
                    value = (value + code * power) % modulus
                    running.append(value)
                hashes[first] = running
            length = tree.depth[tree.parent[node]] + 1
            while length <= tree.depth[node]:
                keys[(length, hashes[first][length])] = node
                length += length & -length
        return cls(factors.width, tree.depth, tree.lo, tree.hi, keys)

    def _probe(self, length: int, value: int, probes: Optional[ProbeCounter]) -> Optional[int]:
        if probes is not None:
            probes.hash_probes += 1
        return self.keys.get((length, value))

    def query(
        self, prefix_hash: Callable[[int], int], plen: int, probes: Optional[ProbeCounter] = None
    ) -> Tuple[int, int]:
        """
        Member range prefixed by the string whose prefix hashes are given

        Searches lengths for the depth p of the exit node's parent, keeping
        p in [low, high); a hit moves low down to the node found, a miss
        moves high up to the length probed.
        """
        if not 1 <= plen <= self.width:
            raise DataValidationError(f"Prefix length {plen} outside 1..{self.width}")
        low, high = 0, plen
        while high - low > 1:
            length = two_fattest(low + 1, high - 1)
            node = self._probe(length, prefix_hash(length), probes)
            if node is None:
                high = length
            elif self.depth[node] >= plen:
                return self.lo[node], self.hi[node]
            else:
                low = self.depth[node]
        length = two_fattest(low + 1, plen)
        node = self._probe(length, prefix_hash(length), probes)
        if node is None:
            return 1, len(self)
        return self.lo[node], self.hi[node]

    def serialize(self, writer: BinaryWriter) -> None:
        writer.u32(self.width)
        writer.array(self.depth)
        writer.array(self.lo)
        writer.array(self.hi)
        entries = sorted(self.keys.items())
        writer.array(length for (length, _), _ in entries)
        writer.array(value for (_, value), _ in entries)
        writer.array(node for _, node in entries)

    @classmethod
    def deserialize(cls, reader: BinaryReader) -> "WeakPrefixIndex":
        width = reader.u32()
        depth, lo, hi = reader.array(), reader.array(), reader.array()
        lengths, values, nodes = reader.array(), reader.array(), reader.array()
        if not len(depth) == len(lo) == len(hi) or not len(lengths) == len(values) == len(nodes):
            raise DataValidationError("Weak prefix search arrays disagree in length")
        return cls(width, depth, lo, hi, dict(zip(zip(lengths, values), nodes)))

