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
Text Core

The indexed text, its alphabet encoding, the suffix arrays of the text
and of its reverse, and the suffix tree every engine walks.

Every positional array is 1-based: index 0 holds a placeholder so that
text position k and suffix rank k are read as array[k].
"""
import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .persistent_base import BinaryReader, BinaryWriter, DataValidationError, PersistentBase

logger = logging.getLogger("edindex")

SENTINEL = 0  # the padding symbol '#', smaller than every alphabet code
ROOT = 0


######################################################################
#  T E X T   C O R P U S
######################################################################
class TextCorpus:
    """
    The text to index, remapped onto internal codes 1..sigma

    Code 0 is the sentinel, sigma + 1 the wildcard and sigma + 2 the code
    given to query symbols that never occur in the text.
    """

    def __init__(self, raw: Union[bytes, Sequence[int]]):
        symbols = list(raw)
        if not symbols:
            raise DataValidationError("Text must contain at least one symbol")
        self.raw = bytes(raw) if isinstance(raw, (bytes, bytearray)) else tuple(symbols)
        self.alphabet: Tuple[int, ...] = tuple(sorted(set(symbols)))
        self._code_of: Dict[int, int] = {symbol: code for code, symbol in enumerate(self.alphabet, start=1)}
        self.codes: List[int] = [SENTINEL] + [self._code_of[symbol] for symbol in symbols]

    def __repr__(self):
        return f"<TextCorpus n={self.n} sigma={self.sigma}>"

    @classmethod
    def from_codes(cls, alphabet: Sequence[int], codes: Sequence[int], is_bytes: bool = True) -> "TextCorpus":
        """Rebuilds a corpus from its alphabet map and 1-based codes"""
        if any(not 1 <= code <= len(alphabet) for code in codes[1:]):
            raise DataValidationError(f"Code outside the alphabet of {len(alphabet)} symbols")
        symbols = [alphabet[code - 1] for code in codes[1:]]
        return cls(bytes(symbols) if is_bytes else symbols)

    @property
    def n(self) -> int:
        """Length of the text"""
        return len(self.codes) - 1

    @property
    def sigma(self) -> int:
        """Number of distinct symbols in the text"""
        return len(self.alphabet)

    @property
    def wildcard(self) -> int:
        """Code of the wildcard symbol"""
        return self.sigma + 1

    @property
    def foreign(self) -> int:
        """Code of any query symbol absent from the text"""
        return self.sigma + 2

    @property
    def is_bytes(self) -> bool:
        """True when the text was given as bytes"""
        return isinstance(self.raw, bytes)

    def encode(self, symbols: Union[bytes, Sequence[int]]) -> Tuple[int, ...]:
        """Maps raw symbols to codes; unknown symbols get the foreign code"""
        return tuple(self._code_of.get(symbol, self.foreign) for symbol in symbols)

    def decode(self, code: int) -> int:
        """Maps a code in 1..sigma back to its raw symbol"""
        return self.alphabet[code - 1]


######################################################################
#  R A N G E S
######################################################################
@dataclass(frozen=True, slots=True)
class RangePair:
    """A closed interval of suffix ranks; empty when lo > hi"""

    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        """True when the range holds no rank"""
        return self.lo > self.hi

    @property
    def width(self) -> int:
        """Number of ranks in the range"""
        return max(0, self.hi - self.lo + 1)

    def __contains__(self, rank: int) -> bool:
        return self.lo <= rank <= self.hi


######################################################################
#  I N D E X   C O R E
######################################################################
@dataclass
class IndexCore(PersistentBase):
    """Suffix arrays of the text and of its reverse, with their inverses"""

    text: List[int]
    sa: List[int]
    isa: List[int]
    rsa: List[int]
    risa: List[int]
    lcp: List[int]
    rtext: List[int] = field(init=False, repr=False)

    def __post_init__(self):
        self.rtext = [SENTINEL] + self.text[:0:-1]

    @property
    def n(self) -> int:
        """Length of the text"""
        return len(self.text) - 1

    def serialize(self, writer: BinaryWriter) -> None:
        for values in (self.sa, self.isa, self.rsa, self.risa, self.lcp):
            writer.array(values[1:])

    @classmethod
    def deserialize(cls, reader: BinaryReader, text: List[int] = None) -> "IndexCore":
        if text is None:
            raise DataValidationError("An index core is read back against its text")
        arrays = [[0] + reader.array() for _ in range(5)]
        for values in arrays:
            if len(values) != len(text):
                raise DataValidationError(f"Positional array of length {len(values) - 1} for a text of {len(text) - 1}")
        return cls(text, *arrays)


def build_suffix_array(codes: Sequence[int]) -> List[int]:
    """
    Sorts the suffixes of a 1-based code sequence by prefix doubling

    A suffix that is a proper prefix of another sorts first.
    """
    n = len(codes) - 1
    if n < 1:
        raise DataValidationError("Cannot sort the suffixes of an empty text")
    rank = np.asarray(codes[1:], dtype=np.int64)
    step = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if step < n:
            second[: n - step] = rank[step:]
        order = np.lexsort((second, rank))
        changed = (np.diff(rank[order]) != 0) | (np.diff(second[order]) != 0)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.concatenate(([0], np.cumsum(changed)))
        if rank[order[-1]] == n - 1 or step >= n:
            break
        step <<= 1
    return [0] + (order + 1).tolist()


def _inverse(sa: List[int]) -> List[int]:
    inverse = [0] * len(sa)
    for rank, position in enumerate(sa[1:], start=1):
        inverse[position] = rank
    return inverse


def _lcp_array(codes: List[int], sa: List[int], isa: List[int]) -> List[int]:
    """Kasai: lcp[k] is the common prefix of the suffixes ranked k - 1 and k"""
    n = len(codes) - 1
    lcp = [0] * (n + 1)
    shared = 0
    for position in range(1, n + 1):
        rank = isa[position]
        if rank == 1:
            shared = 0
            continue
        other = sa[rank - 1]
        while position + shared <= n and other + shared <= n and codes[position + shared] == codes[other + shared]:
            shared += 1
        lcp[rank] = shared
        if shared:
            shared -= 1
    return lcp


def build_index_core(text: TextCorpus) -> IndexCore:
    """Builds sa, isa and their reverse-text counterparts"""
    codes = text.codes
    sa = build_suffix_array(codes)
    isa = _inverse(sa)
    rcodes = [SENTINEL] + codes[:0:-1]
    rsa = build_suffix_array(rcodes)
    core = IndexCore(codes, sa, isa, rsa, _inverse(rsa), _lcp_array(codes, sa, isa))
    logger.debug("Built index core over %d symbols", core.n)
    return core


def _range(text: List[int], sa: List[int], pattern: Sequence[int]) -> RangePair:
    length = len(pattern)
    target = list(pattern)
    n = len(text) - 1

    def key(position):
        return text[position : position + length]

    lo = bisect_left(sa, target, 1, n + 1, key=key)
    hi = bisect_right(sa, target, lo, n + 1, key=key)
    return RangePair(lo, hi - 1)


def suffix_range(core: IndexCore, pattern: Sequence[int]) -> RangePair:
    """Ranks of the suffixes that start with pattern"""
    if not pattern:
        raise DataValidationError("Pattern must not be empty")
    return _range(core.text, core.sa, pattern)


def compute_left_right(core: IndexCore, q: Sequence[int]) -> Tuple[List[RangePair], List[RangePair]]:
    """
    Ranges for every prefix and every suffix of q

    left[i] ranks, among reversed-text suffixes, the text prefixes ending
    with q[1..i]; right[i] ranks the suffixes starting with q[i..m].
    left[0] and right[m + 1] are the whole text; right[0] is unused.
    """
    m = len(q)
    if m < 1:
        raise DataValidationError("Pattern must not be empty")
    everything = RangePair(1, core.n)
    rtext = core.rtext
    left = [everything]
    for i in range(1, m + 1):
        left.append(_range(rtext, core.rsa, q[i - 1 :: -1]))
    right = [everything] * (m + 2)
    for i in range(1, m + 1):
        right[i] = _range(core.text, core.sa, q[i - 1 :])
    return left, right


######################################################################
#  L C P   I N T E R V A L S
######################################################################
@dataclass
class IntervalTree:
    """Nested lcp intervals over a sorted list of strings, node 0 is the root"""

    depth: List[int]
    lo: List[int]
    hi: List[int]
    parent: List[int]
    children: List[List[int]]


def build_lcp_intervals(lcp: Sequence[int], leaf_depths: Sequence[int]) -> IntervalTree:
    """
    Builds the compacted trie of sorted strings from their lcp array

    Both inputs are 1-based; lcp[k] is shared by items k - 1 and k and
    leaf_depths[k] is the length of item k. An item equal to an inner
    node's string hangs below it through an empty edge.
    """
    count = len(leaf_depths) - 1
    tree = IntervalTree([0], [1], [count], [-1], [[]])

    def add(depth, lo, hi):
        tree.depth.append(depth)
        tree.lo.append(lo)
        tree.hi.append(hi)
        tree.parent.append(-1)
        tree.children.append([])
        return len(tree.depth) - 1

    def attach(parent, child):
        tree.parent[child] = parent
        tree.children[parent].append(child)

    stack = [ROOT]
    last = add(leaf_depths[1], 1, 1)
    for k in range(2, count + 2):
        shared = lcp[k] if k <= count else 0
        while tree.depth[stack[-1]] > shared:
            node = stack.pop()
            attach(node, last)
            tree.hi[node] = k - 1
            last = node
        if tree.depth[stack[-1]] < shared:
            node = add(shared, tree.lo[last], 0)
            stack.append(node)
        attach(stack[-1], last)
        if k <= count:
            last = add(leaf_depths[k], k, k)
    return tree


######################################################################
#  S U F F I X   T R E E
######################################################################
class SuffixTree:
    """
    Compacted trie of all suffixes, one leaf per suffix

    Children are keyed by the first code of their edge; the empty edge to
    a suffix that ends at an inner node is keyed by the sentinel.
    """

    def __init__(self, core: IndexCore, intervals: IntervalTree):
        self.core = core
        self.depth = intervals.depth
        self.lo = intervals.lo
        self.hi = intervals.hi
        self.parent = intervals.parent
        self.key = [SENTINEL] * len(self.depth)
        self.children: List[Dict[int, int]] = []
        for node, kids in enumerate(intervals.children):
            keyed = {}
            for child in kids:
                code = self.edge_code(child, self.depth[node] + 1)
                self.key[child] = code
                keyed[code] = child
            self.children.append(keyed)

    def __len__(self):
        return len(self.depth)

    def edge_code(self, node: int, offset: int) -> int:
        """Code at 1-based string depth offset below node's first suffix"""
        position = self.core.sa[self.lo[node]] + offset - 1
        return self.core.text[position] if position <= self.core.n else SENTINEL

    def is_leaf(self, node: int) -> bool:
        """True for the nodes that stand for a single suffix"""
        return not self.children[node]

    def leaf_count(self, node: int) -> int:
        """Number of suffixes below node"""
        return self.hi[node] - self.lo[node] + 1

    def leaves(self) -> List[int]:
        """Every leaf, in suffix-rank order"""
        return [node for node in range(len(self)) if self.is_leaf(node)]


def build_suffix_tree(text: TextCorpus, core: IndexCore) -> SuffixTree:
    """Builds the suffix tree from the suffix and lcp arrays"""
    n = core.n
    leaf_depths = [0] + [n - core.sa[rank] + 1 for rank in range(1, n + 1)]
    tree = SuffixTree(core, build_lcp_intervals(core.lcp, leaf_depths))
    logger.debug("Suffix tree of %r has %d nodes", text, len(tree))
    return tree
