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
Centroid Path Engine

The suffix tree is cut into centroid paths. For every path three
correction trees hold the suffixes hanging off it by a light edge, each
pre-modified at the light edge's first symbol:

    SUB1  the light symbol replaced by the path's branching symbol
    DEL1  the light symbol deleted, when the branching symbol follows it
    SUB2  the light symbol replaced by the wildcard

A pattern walks the tree once; every path it touches answers the
substitutions and insertions that land in its light subtrees through
those trees, so the work does not depend on the alphabet size.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .colors import ColorReporter
from .engine_small import Occurrence, QueryContext, SmallEngine, canonical_matches, check_occurrence
from .persistent_base import BinaryReader, BinaryWriter, DataValidationError, PersistentBase
from .poly_hash import EditDescriptor, HashParams, find_injective_seed, hash_edited_prefix
from .probes import ProbeCounter
from .text_core import ROOT, SENTINEL, SuffixTree, TextCorpus, build_index_core, build_suffix_tree
from .weak_prefix import FactorSet, PrefixSum, WeakPrefixIndex, build_factor_set, group_sorted

logger = logging.getLogger("edindex")


######################################################################
#  C E N T R O I D   D E C O M P O S I T I O N
######################################################################
@dataclass
class CentroidDecomposition:
    """
    Heavy child, path and rank on the path of every suffix tree node

    heavy[v] is -1 for leaves. paths[p] lists the nodes of path p from
    its head down to the leaf it ends at.
    """

    heavy: List[int]
    path_of: List[int]
    rank_in_path: List[int]
    paths: List[List[int]]

    def __len__(self):
        return len(self.paths)

    def branch_chars(self, st: SuffixTree, path: int) -> List[Tuple[int, int]]:
        """(depth, branching code) at every inner node of a path"""
        return [(st.depth[node], st.key[self.heavy[node]]) for node in self.paths[path] if self.heavy[node] >= 0]

    def paths_to_root(self, st: SuffixTree, node: int) -> int:
        """Number of centroid paths met walking from node up to the root"""
        count = 1
        while node != ROOT:
            parent = st.parent[node]
            if self.path_of[parent] != self.path_of[node]:
                count += 1
            node = parent
        return count


def _heaviest(st: SuffixTree, node: int) -> int:
    """Child with the most leaves, the smallest edge code on ties"""
    children = st.children[node]
    best = min(children, key=lambda code: (-st.leaf_count(children[code]), code))
    return children[best]


def decompose_centroid(st: SuffixTree) -> CentroidDecomposition:
    """Splits the suffix tree into centroid paths"""
    size = len(st)
    heavy = [-1] * size
    path_of = [-1] * size
    rank_in_path = [0] * size
    paths: List[List[int]] = []
    heads = [ROOT]
    while heads:
        node = heads.pop()
        path = len(paths)
        nodes: List[int] = []
        while True:
            path_of[node] = path
            rank_in_path[node] = len(nodes)
            nodes.append(node)
            if st.is_leaf(node):
                break
            heavy[node] = _heaviest(st, node)
            for code in sorted(st.children[node], reverse=True):
                child = st.children[node][code]
                if child != heavy[node]:
                    heads.append(child)
            node = heavy[node]
        paths.append(nodes)
    logger.debug("Centroid decomposition: %d path(s) over %d node(s)", len(paths), size)
    return CentroidDecomposition(heavy, path_of, rank_in_path, paths)


######################################################################
#  C O R R E C T I O N   T R E E S
######################################################################
class CorrectionKind(IntEnum):
    """The three ways a light suffix is pre-modified"""

    SUB1 = 0
    DEL1 = 1
    SUB2 = 2


@dataclass(frozen=True, slots=True)
class CorrectionEntry:
    """A modified suffix: its padded key, color, modification position and text start"""

    key: Tuple[int, ...]
    color: int
    pos: int
    start: int


@dataclass
class CorrectionEntries:
    """The sorted entries of one correction tree, before a seed is chosen"""

    kind: CorrectionKind
    path: int
    width: int
    branch_chars: Dict[int, int]
    entries: List[CorrectionEntry]

    def __len__(self):
        return len(self.entries)

    @property
    def factors(self) -> FactorSet:
        """Distinct keys with their entry counts"""
        return group_sorted(self.width, [entry.key for entry in self.entries])


def collect_correction_entries(
    st: SuffixTree, decomp: CentroidDecomposition, text: TextCorpus, b: int
) -> Dict[Tuple[int, CorrectionKind], CorrectionEntries]:
    """
    Every modified suffix, grouped by (path, kind)

    Only modifications at positions up to b are kept. Colors are
    light_code * (b + 2) + pos for SUB1 and DEL1, light_code for SUB2.
    Empty trees are left out.
    """
    core = st.core
    width = b + 1
    radix = b + 2
    padded = core.text + [SENTINEL] * (width + 1)
    wildcard = text.wildcard
    collected: Dict[Tuple[int, CorrectionKind], CorrectionEntries] = {}
    for path, nodes in enumerate(decomp.paths):
        bins: Dict[CorrectionKind, List[CorrectionEntry]] = {kind: [] for kind in CorrectionKind}
        branch_chars: Dict[int, int] = {}
        for node in nodes:
            heavy = decomp.heavy[node]
            depth = st.depth[node]
            if heavy < 0 or depth + 1 > b:
                break
            pos = depth + 1
            branch = st.key[heavy]
            branch_chars[pos] = branch
            for light, child in st.children[node].items():
                if child == heavy or light == SENTINEL:
                    continue
                for rank in range(st.lo[child], st.hi[child] + 1):
                    start = core.sa[rank]
                    segment = tuple(padded[start : start + width + 1])
                    head, tail = segment[:depth], segment[depth + 1 :]
                    if branch != SENTINEL:
                        color = light * radix + pos
                        bins[CorrectionKind.SUB1].append(CorrectionEntry(head + (branch,) + tail[:-1], color, pos, start))
                        if tail[0] == branch:
                            bins[CorrectionKind.DEL1].append(CorrectionEntry(head + tail, color, pos, start))
                    bins[CorrectionKind.SUB2].append(CorrectionEntry(head + (wildcard,) + tail[:-1], light, pos, start))
        for kind, entries in bins.items():
            if entries:
                entries.sort(key=lambda entry: (entry.key, entry.start))
                collected[(path, kind)] = CorrectionEntries(kind, path, width, branch_chars, entries)
    return collected


class CorrectionTree(PersistentBase):
    """
    One correction tree: entry-aligned colors, positions and starts, the
    weak prefix search over its distinct keys and their prefix sums

    Entry arrays are 1-based.
    """

    def __init__(
        self,
        kind: CorrectionKind,
        path: int,
        width: int,
        branch_chars: Dict[int, int],
        colors: List[int],
        positions: List[int],
        starts: List[int],
        sums: PrefixSum,
        wps: WeakPrefixIndex,
    ):
        if not len(colors) == len(positions) == len(starts) == sums.total + 1:
            raise DataValidationError("Correction tree arrays disagree in length")
        self.kind = kind
        self.path = path
        self.width = width
        self.branch_chars = branch_chars
        self.colors = colors
        self.positions = positions
        self.starts = starts
        self.sums = sums
        self.wps = wps
        self.reporter = ColorReporter(colors)

    def __len__(self):
        return len(self.colors) - 1

    def __repr__(self):
        return f"<CorrectionTree {self.kind.name} path={self.path} entries={len(self)}>"

    @property
    def radix(self) -> int:
        """Multiplier separating the symbol from the position in a color"""
        return self.width + 1

    @classmethod
    def build(cls, collected: CorrectionEntries, params: HashParams) -> "CorrectionTree":
        """Indexes collected entries under a chosen seed"""
        factors = collected.factors
        entries = collected.entries
        return cls(
            collected.kind,
            collected.path,
            collected.width,
            dict(collected.branch_chars),
            [0] + [entry.color for entry in entries],
            [0] + [entry.pos for entry in entries],
            [0] + [entry.start for entry in entries],
            PrefixSum(factors.counts),
            WeakPrefixIndex.build(factors, params),
        )

    def entry_edit(self, index: int, q: Sequence[int], form: EditDescriptor) -> Optional[EditDescriptor]:
        """
        The edit of q that entry index stands for, if form can prefix it

        Checking that edit at the entry's start proves form prefixes the
        entry's key.
        """
        m = len(q) - 1
        pos, color = self.positions[index], self.colors[index]
        if self.kind == CorrectionKind.SUB2:
            if pos != form.pos:
                return None
            return EditDescriptor(form.kind, pos, color)
        if pos > m:
            return EditDescriptor.exact()
        ch = color // self.radix
        if self.kind == CorrectionKind.SUB1:
            if q[pos] != self.branch_chars.get(pos):
                return None
            return EditDescriptor.substitution(pos, ch)
        return EditDescriptor.insertion(pos, ch)

    def color_edit(self, color: int, m: int, form: EditDescriptor, record: "PathRecord") -> Optional[EditDescriptor]:
        """The edit a reported color asks for, None when the color is filtered out"""
        if self.kind == CorrectionKind.SUB2:
            if color in (record.pattern_char, record.branch_char):
                return None
            return EditDescriptor(form.kind, form.pos, color)
        ch, pos = divmod(color, self.radix)
        if pos > record.depth or pos > m:
            return None
        if self.kind == CorrectionKind.SUB1:
            return EditDescriptor.substitution(pos, ch)
        return EditDescriptor.insertion(pos, ch)

    def serialize(self, writer: BinaryWriter) -> None:
        writer.u32(self.kind)
        writer.u64(self.path)
        writer.u32(self.width)
        branch = sorted(self.branch_chars.items())
        writer.array(pos for pos, _ in branch)
        writer.array(code for _, code in branch)
        writer.array(self.colors[1:])
        writer.array(self.positions[1:])
        writer.array(self.starts[1:])
        self.sums.serialize(writer)
        self.wps.serialize(writer)

    @classmethod
    def deserialize(cls, reader: BinaryReader) -> "CorrectionTree":
        kind = CorrectionKind(reader.u32())
        path = reader.u64()
        width = reader.u32()
        positions_of_branch, branch_codes = reader.array(), reader.array()
        if len(positions_of_branch) != len(branch_codes):
            raise DataValidationError("Branching symbol arrays disagree in length")
        colors = [0] + reader.array()
        positions = [0] + reader.array()
        starts = [0] + reader.array()
        sums = PrefixSum.deserialize(reader)
        wps = WeakPrefixIndex.deserialize(reader)
        return cls(kind, path, width, dict(zip(positions_of_branch, branch_codes)), colors, positions, starts, sums, wps)


def build_correction_trees(
    st: SuffixTree,
    decomp: CentroidDecomposition,
    text: TextCorpus,
    b: int,
    params: HashParams,
    collected: Optional[Dict[Tuple[int, CorrectionKind], CorrectionEntries]] = None,
) -> Dict[int, Dict[CorrectionKind, CorrectionTree]]:
    """Correction trees by path id, then by kind; empty trees are absent"""
    if collected is None:
        collected = collect_correction_entries(st, decomp, text, b)
    trees: Dict[int, Dict[CorrectionKind, CorrectionTree]] = {}
    for (path, kind), entries in sorted(collected.items()):
        trees.setdefault(path, {})[kind] = CorrectionTree.build(entries, params)
    return trees


def entry_census(trees: Dict[int, Dict[CorrectionKind, CorrectionTree]]) -> Dict[CorrectionKind, int]:
    """Number of entries stored per tree kind"""
    census = {kind: 0 for kind in CorrectionKind}
    for by_kind in trees.values():
        for kind, tree in by_kind.items():
            census[kind] += len(tree)
    return census


######################################################################
#  P A T T E R N   T R A V E R S A L
######################################################################
class TraversalEnd(Enum):
    """How the walk of a pattern down the suffix tree stopped"""

    BRANCHING = "branching"
    MID_EDGE = "mid-edge"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True, slots=True)
class PathRecord:
    """
    Where the pattern leaves one centroid path

    depth symbols of the pattern match along the path; pattern_char is
    q[depth + 1] and branch_char the path's own continuation there. Both
    are None once the pattern is used up; branch_char is also None at a
    leaf.
    """

    path: int
    depth: int
    pattern_char: Optional[int]
    branch_char: Optional[int]
    at_node: bool


@dataclass
class PathTraversal:
    """The records of every path the pattern touches, in walk order"""

    records: List[PathRecord]
    end: TraversalEnd

    def __iter__(self) -> Iterator[PathRecord]:
        return iter(self.records)

    @property
    def t(self) -> int:
        """Number of paths touched"""
        return len(self.records)


def traverse_pattern(
    st: SuffixTree, decomp: CentroidDecomposition, pattern: Sequence[int], probes: Optional[ProbeCounter] = None
) -> PathTraversal:
    """Walks the pattern's codes from the root, recording each centroid path left"""
    m = len(pattern)
    if m < 1:
        raise DataValidationError("Pattern must not be empty")
    q = [0] + list(pattern)
    text, sa = st.core.text, st.core.sa
    probes = probes if probes is not None else ProbeCounter()
    records: List[PathRecord] = []
    node = ROOT
    while True:
        depth = st.depth[node]
        if depth >= m:
            records.append(PathRecord(decomp.path_of[node], m, None, None, True))
            return PathTraversal(records, TraversalEnd.EXHAUSTED)
        ch = q[depth + 1]
        heavy = decomp.heavy[node]
        branch = st.key[heavy] if heavy >= 0 else None
        probes.array_probes += 1
        if branch == ch:
            child = heavy
        else:
            records.append(PathRecord(decomp.path_of[node], depth, ch, branch, True))
            child = st.children[node].get(ch)
            if child is None:
                return PathTraversal(records, TraversalEnd.BRANCHING)
        base = sa[st.lo[child]] - 1
        for offset in range(depth + 2, min(st.depth[child], m) + 1):
            probes.array_probes += 1
            code = text[base + offset]
            if code != q[offset]:
                records.append(PathRecord(decomp.path_of[child], offset - 1, q[offset], code, False))
                return PathTraversal(records, TraversalEnd.MID_EDGE)
        if st.depth[child] > m:
            records.append(PathRecord(decomp.path_of[child], m, None, None, False))
            return PathTraversal(records, TraversalEnd.EXHAUSTED)
        node = child


######################################################################
#  C E N T R O I D   E N G I N E
######################################################################
@dataclass
class CentroidEngine(PersistentBase):
    """The small engine's structures plus the suffix tree, its centroid paths and their correction trees"""

    small: SmallEngine
    trees: Dict[int, Dict[CorrectionKind, CorrectionTree]]
    st: SuffixTree = field(repr=False)
    decomp: CentroidDecomposition = field(repr=False)

    @property
    def corpus(self) -> TextCorpus:
        """The indexed text"""
        return self.small.corpus

    @property
    def params(self) -> HashParams:
        """Seed shared by U and every correction tree"""
        return self.small.params

    @property
    def b(self) -> int:
        """Longest pattern accepted"""
        return self.small.b

    @classmethod
    def build(cls, corpus: TextCorpus, b: int, seed: int = 0, max_retries: int = 32) -> "CentroidEngine":
        """Builds every structure under one seed injective on U and on every tree's keys"""
        if b < 1:
            raise DataValidationError(f"Build parameter b must be positive, got {b}")
        logger.info("Building centroid engine over %d symbols (sigma=%d, b=%d)", corpus.n, corpus.sigma, b)
        core = build_index_core(corpus)
        st = build_suffix_tree(corpus, core)
        decomp = decompose_centroid(st)
        collected = collect_correction_entries(st, decomp, corpus, b)
        factors = build_factor_set(core, b + 1)
        member_sets = [factors.members] + [entries.factors.members for entries in collected.values()]
        params = find_injective_seed(member_sets, corpus.n, corpus.sigma, np.random.default_rng(seed), max_retries)
        small = SmallEngine.assemble(corpus, core, params, b, factors)
        trees = build_correction_trees(st, decomp, corpus, b, params, collected)
        census = entry_census(trees)
        logger.info(
            "Built %d correction tree(s) on %d path(s): %d entries (%s)",
            len(collected),
            len(decomp),
            sum(census.values()),
            ", ".join(f"{kind.name}={count}" for kind, count in census.items()),
        )
        return cls(small, trees, st, decomp)

    def tree(self, path: int, kind: CorrectionKind) -> Optional[CorrectionTree]:
        """The correction tree of a path, None when it is empty"""
        return self.trees.get(path, {}).get(kind)

    def query_correction_tree(
        self, tree: Optional[CorrectionTree], ctx: QueryContext, form: EditDescriptor, record: PathRecord
    ) -> List[Occurrence]:
        """
        Occurrences found through the entries of tree prefixed by form

        A preliminary check on the first entry of the range either admits
        the range or answers empty. Each distinct color of the range that
        passes its filter then becomes one modified-pattern search.
        """
        if tree is None:
            return []
        plen = form.edited_length(ctx.m)
        if plen > tree.width:
            return []
        first, last = tree.wps.query(lambda j: hash_edited_prefix(ctx.hashes, form, j), plen, ctx.probes)
        low, high = tree.sums.range(first, last)
        ctx.probes.array_probes += 1
        edit = tree.entry_edit(low, ctx.q, form)
        if edit is None or not check_occurrence(self.small.core, ctx.left, ctx.right, edit, tree.starts[low], ctx.probes):
            return []
        found: List[Occurrence] = []
        for color in tree.reporter.distinct(low, high, ctx.probes):
            edit = tree.color_edit(color, ctx.m, form, record)
            if edit is not None:
                found.extend(self.small.query_modified_pattern(ctx, edit))
        return found

    def _query_path(self, ctx: QueryContext, record: PathRecord) -> List[Occurrence]:
        found: List[Occurrence] = []
        for kind in (CorrectionKind.SUB1, CorrectionKind.DEL1):
            found.extend(self.query_correction_tree(self.tree(record.path, kind), ctx, EditDescriptor.exact(), record))
        if record.pattern_char is None:
            return found
        pos = record.depth + 1
        if record.at_node:
            sub2 = self.tree(record.path, CorrectionKind.SUB2)
            wildcard = self.corpus.wildcard
            for form in (EditDescriptor.substitution(pos, wildcard), EditDescriptor.insertion(pos, wildcard)):
                found.extend(self.query_correction_tree(sub2, ctx, form, record))
        if record.branch_char:
            # the path's own continuation is in no correction tree of the path
            found.extend(self.small.query_modified_pattern(ctx, EditDescriptor.substitution(pos, record.branch_char)))
            found.extend(self.small.query_modified_pattern(ctx, EditDescriptor.insertion(pos, record.branch_char)))
        return found

    def query(self, pattern: Union[bytes, Sequence[int]], probes: Optional[ProbeCounter] = None) -> List[Occurrence]:
        """Every substring within edit distance one of pattern"""
        small = self.small
        ctx = small.prepare(pattern, probes)
        m, n, text = ctx.m, small.core.n, small.core.text
        found = small.query_modified_pattern(ctx, EditDescriptor.exact())
        for occurrence in list(found):
            if occurrence.start + m <= n:
                ctx.probes.array_probes += 1
                ctx.probes.reported += 1
                edit = ctx.canonical(EditDescriptor.insertion(m + 1, text[occurrence.start + m]))
                found.append(Occurrence(occurrence.start, m + 1, edit))
        if m > 1:
            for i in range(1, m + 1):
                if ctx.run_start[i] == i:
                    found.extend(small.query_modified_pattern(ctx, EditDescriptor.deletion(i)))
        traversal = traverse_pattern(self.st, self.decomp, ctx.q[1:], ctx.probes)
        for record in traversal:
            found.extend(self._query_path(ctx, record))
        matches = canonical_matches(found)
        logger.debug(
            "Centroid engine: %d match(es) over %d path(s), ended %s", len(matches), traversal.t, traversal.end.value
        )
        return matches

    def serialize(self, writer: BinaryWriter) -> None:
        self.small.serialize(writer)
        trees = [tree for path in sorted(self.trees) for _, tree in sorted(self.trees[path].items())]
        writer.u64(len(trees))
        for tree in trees:
            tree.serialize(writer)

    @classmethod
    def deserialize(cls, reader: BinaryReader, corpus: TextCorpus = None, params: HashParams = None, b: int = 0):
        small = SmallEngine.deserialize(reader, corpus, params, b)
        st = build_suffix_tree(corpus, small.core)
        decomp = decompose_centroid(st)
        trees: Dict[int, Dict[CorrectionKind, CorrectionTree]] = {}
        for _ in range(reader.u64()):
            tree = CorrectionTree.deserialize(reader)
            if tree.path >= len(decomp):
                raise DataValidationError(f"Correction tree names path {tree.path} of {len(decomp)}")
            trees.setdefault(tree.path, {})[tree.kind] = tree
        return cls(small, trees, st, decomp)


def query_one_error_large(engine: CentroidEngine, pattern: Union[bytes, Sequence[int]]) -> List[Occurrence]:
    """Every substring within edit distance one, through centroid paths and correction trees"""
    return engine.query(pattern)
