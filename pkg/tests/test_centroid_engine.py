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
Test cases for the Centroid Path Engine
"""
import logging
from unittest import TestCase
from unittest.mock import patch

from factory.random import randgen, reseed_random

from manage import app
from edindex.models import (
    CentroidEngine,
    CorrectionKind,
    DataValidationError,
    EditDescriptor,
    EditKind,
    PathTraversal,
    ProbeCounter,
    SmallEngine,
    TextCorpus,
    build_index_core,
    build_suffix_tree,
    decompose_centroid,
    oracle_query,
    query_one_error_large,
    traverse_pattern,
)
from edindex.models.centroid_engine import PathRecord, TraversalEnd, collect_correction_entries, entry_census
from edindex.models.text_core import SENTINEL
from tests.factories import CorpusFactory, apply_edit, random_pattern, random_symbols
from tests.test_engine_small import BANANA_NANA


def suffix_tree(raw):
    """Suffix tree and centroid paths of raw"""
    corpus = TextCorpus(raw)
    st = build_suffix_tree(corpus, build_index_core(corpus))
    return corpus, st, decompose_centroid(st)


def expected_entries(st, decomp, b):
    """Every (path, kind, start, pos, color) found by walking up from each leaf"""
    core = st.core
    n = core.n
    radix = b + 2
    expected = set()
    for leaf in st.leaves():
        start = core.sa[st.lo[leaf]]
        child = leaf
        while child != 0:
            node = st.parent[child]
            heavy = decomp.heavy[node]
            depth = st.depth[node]
            light = st.key[child]
            if child != heavy and light != SENTINEL and depth + 1 <= b:
                path, pos = decomp.path_of[node], depth + 1
                branch = st.key[heavy]
                expected.add((path, CorrectionKind.SUB2, start, pos, light))
                if branch != SENTINEL:
                    expected.add((path, CorrectionKind.SUB1, start, pos, light * radix + pos))
                    after = start + pos
                    if after <= n and core.text[after] == branch:
                        expected.add((path, CorrectionKind.DEL1, start, pos, light * radix + pos))
            child = node
    return expected


def tree_searches(engine, record):
    """(kind, form) of every correction tree search made for one path record"""
    searches = [(CorrectionKind.SUB1, EditDescriptor.exact()), (CorrectionKind.DEL1, EditDescriptor.exact())]
    if record.pattern_char is not None and record.at_node:
        pos, wildcard = record.depth + 1, engine.corpus.wildcard
        searches.append((CorrectionKind.SUB2, EditDescriptor.substitution(pos, wildcard)))
        searches.append((CorrectionKind.SUB2, EditDescriptor.insertion(pos, wildcard)))
    return searches


def recount_tree(collected, record, q, kind, form):
    """(start, length) of the entries of one tree prefixed by the edited pattern, found by scanning them all"""
    entries = collected.get((record.path, kind))
    target = apply_edit(q, form)
    if entries is None or len(target) > entries.width:
        return set()
    m = len(q)
    found = set()
    for entry in entries.entries:
        if entry.key[: len(target)] != target:
            continue
        if kind == CorrectionKind.SUB2:
            if entry.color in (record.pattern_char, record.branch_char):
                continue
            found.add((entry.start, m if form.kind == EditKind.SUBSTITUTION else m + 1))
        elif entry.pos <= min(m, record.depth):
            found.add((entry.start, m if kind == CorrectionKind.SUB1 else m + 1))
    return found


######################################################################
#  C E N T R O I D   D E C O M P O S I T I O N   T E S T   C A S E S
######################################################################
class TestCentroidDecomposition(TestCase):
    """CentroidDecomposition Test Cases"""

    def setUp(self):
        reseed_random(404)

    def test_unary_text(self):
        """It should follow the longest chain of a unary text"""
        _, st, decomp = suffix_tree(b"aaa")
        self.assertEqual(len(decomp), 3)
        self.assertEqual(len(decomp.paths[0]), 4)
        self.assertEqual(sorted(len(nodes) for nodes in decomp.paths[1:]), [1, 1])
        self.assertEqual(decomp.paths[0][0], 0)
        self.assertTrue(st.is_leaf(decomp.paths[0][-1]))

    def test_ties_go_to_smallest_symbol(self):
        """It should take the smallest edge symbol as heavy child on a tie"""
        _, st, decomp = suffix_tree(b"abc")
        self.assertEqual(len(decomp), 3)
        self.assertEqual(st.key[decomp.heavy[0]], 1)

    def test_every_node_on_one_path(self):
        """It should place every node on exactly one path, heads first"""
        _, st, decomp = suffix_tree(CorpusFactory(sigma=3, length=90).raw)
        seen = [node for nodes in decomp.paths for node in nodes]
        self.assertEqual(sorted(seen), list(range(len(st))))
        for path, nodes in enumerate(decomp.paths):
            for rank, node in enumerate(nodes):
                self.assertEqual(decomp.path_of[node], path)
                self.assertEqual(decomp.rank_in_path[node], rank)
            self.assertTrue(st.is_leaf(nodes[-1]))

    def test_logarithmic_paths(self):
        """It should meet at most floor(log2 n) + 1 paths from any leaf to the root"""
        for sigma in (1, 2, 4):
            corpus, st, decomp = suffix_tree(CorpusFactory(sigma=sigma, length=128).raw)
            bound = corpus.n.bit_length()
            for leaf in st.leaves():
                self.assertLessEqual(decomp.paths_to_root(st, leaf), bound)

    def test_branch_chars(self):
        """It should list the heavy symbol at every inner node of a path"""
        _, st, decomp = suffix_tree(b"aaa")
        self.assertEqual(decomp.branch_chars(st, 0), [(0, 1), (1, 1), (2, SENTINEL)])


######################################################################
#  C O R R E C T I O N   T R E E   T E S T   C A S E S
######################################################################
class TestCorrectionTrees(TestCase):
    """CorrectionTree Test Cases"""

    @classmethod
    def setUpClass(cls):
        """This runs once before the entire test suite"""
        app.config["TESTING"] = True
        app.logger.setLevel(logging.CRITICAL)
        app.app_context().push()

    def setUp(self):
        reseed_random(808)

    def test_two_symbol_text(self):
        """It should store the light suffix of ab once per applicable tree"""
        engine = CentroidEngine.build(TextCorpus(b"ab"), 2)
        sub1 = engine.tree(0, CorrectionKind.SUB1)
        self.assertEqual(sub1.colors[1:], [9])
        self.assertEqual(sub1.positions[1:], [1])
        self.assertEqual(sub1.starts[1:], [2])
        self.assertIsNone(engine.tree(0, CorrectionKind.DEL1))
        sub2 = engine.tree(0, CorrectionKind.SUB2)
        self.assertEqual(sub2.colors[1:], [2])
        self.assertEqual(sub2.radix, 4)

    def test_entries_match_leaf_walks(self):
        """It should store exactly the light suffixes found by walking up from each leaf"""
        for sigma, b in ((2, 5), (3, 4), (5, 3)):
            corpus, st, decomp = suffix_tree(CorpusFactory(sigma=sigma, length=70).raw)
            collected = collect_correction_entries(st, decomp, corpus, b)
            found = {
                (path, kind, entry.start, entry.pos, entry.color)
                for (path, kind), entries in collected.items()
                for entry in entries.entries
            }
            self.assertEqual(found, expected_entries(st, decomp, b))

    def test_entry_keys(self):
        """It should key each entry by its suffix with the light symbol modified"""
        corpus, st, decomp = suffix_tree(CorpusFactory(sigma=3, length=60).raw)
        b = 4
        width = b + 1
        padded = st.core.text + [SENTINEL] * (width + 1)
        collected = collect_correction_entries(st, decomp, corpus, b)
        for (_, kind), entries in collected.items():
            self.assertEqual(entries.entries, sorted(entries.entries, key=lambda entry: (entry.key, entry.start)))
            for entry in entries.entries:
                suffix = padded[entry.start : entry.start + width + 1]
                cut = entry.pos - 1
                if kind == CorrectionKind.SUB2:
                    expected = suffix[:cut] + [corpus.wildcard] + suffix[cut + 1 : width]
                elif kind == CorrectionKind.SUB1:
                    expected = suffix[:cut] + [entries.branch_chars[entry.pos]] + suffix[cut + 1 : width]
                else:
                    expected = suffix[:cut] + suffix[cut + 1 :]
                self.assertEqual(list(entry.key), expected)

    def test_census_bound(self):
        """It should store at most 3 n (floor(log2 n) + 1) entries"""
        for sigma in (1, 2, 4):
            corpus = CorpusFactory(sigma=sigma, length=64)
            engine = CentroidEngine.build(corpus, 64)
            census = entry_census(engine.trees)
            self.assertLessEqual(sum(census.values()), 3 * corpus.n * corpus.n.bit_length())
            self.assertLessEqual(census[CorrectionKind.DEL1], census[CorrectionKind.SUB1])

    def test_tree_answers_match_recount(self):
        """It should answer each tree search with exactly the prefixed entries that pass its filter"""
        for sigma, b in ((1, 5), (2, 6), (3, 5), (5, 4)):
            for _ in range(3):
                corpus = CorpusFactory(sigma=sigma, length=randgen.randint(20, 120))
                engine = CentroidEngine.build(corpus, b)
                collected = collect_correction_entries(engine.st, engine.decomp, engine.corpus, b)
                for _ in range(15):
                    ctx = engine.small.prepare(random_pattern(corpus.raw, b))
                    q = tuple(ctx.q[1:])
                    for record in traverse_pattern(engine.st, engine.decomp, q):
                        for kind, form in tree_searches(engine, record):
                            found = engine.query_correction_tree(engine.tree(record.path, kind), ctx, form, record)
                            self.assertEqual(
                                {(match.start, match.length) for match in found},
                                recount_tree(collected, record, q, kind, form),
                                f"{corpus.raw!r} {q} {record} {kind.name} {form}",
                            )

    def test_paths_answer_disjoint_matches(self):
        """It should never find the same match through the trees of two different paths"""
        for sigma in (2, 3, 4):
            corpus = CorpusFactory(sigma=sigma, length=150)
            engine = CentroidEngine.build(corpus, 8)
            for _ in range(40):
                ctx = engine.small.prepare(random_pattern(corpus.raw, 8))
                seen = set()
                for record in traverse_pattern(engine.st, engine.decomp, ctx.q[1:]):
                    matches = {
                        (match.start, match.length)
                        for kind, form in tree_searches(engine, record)
                        for match in engine.query_correction_tree(engine.tree(record.path, kind), ctx, form, record)
                    }
                    self.assertTrue(seen.isdisjoint(matches), f"{corpus.raw!r} {ctx.q[1:]} {record}")
                    seen |= matches

    def test_missing_tree(self):
        """It should answer nothing from a tree that was never built"""
        engine = CentroidEngine.build(TextCorpus(b"ab"), 2)
        ctx = engine.small.prepare(b"ab")
        record = PathRecord(0, 0, 1, 1, True)
        self.assertEqual(engine.query_correction_tree(None, ctx, EditDescriptor.exact(), record), [])


######################################################################
#  T R A V E R S A L   T E S T   C A S E S
######################################################################
class TestTraversal(TestCase):
    """Pattern traversal Test Cases"""

    def setUp(self):
        reseed_random(606)

    def test_banana(self):
        """It should leave three paths walking nana through banana"""
        corpus, st, decomp = suffix_tree(b"banana")
        traversal = traverse_pattern(st, decomp, corpus.encode(b"nana"))
        self.assertIsInstance(traversal, PathTraversal)
        self.assertEqual(traversal.t, 3)
        self.assertEqual(traversal.end, TraversalEnd.EXHAUSTED)
        first, second, last = traversal
        self.assertEqual(first, PathRecord(0, 0, 3, 1, True))
        self.assertEqual((second.depth, second.pattern_char, second.branch_char), (2, 3, SENTINEL))
        self.assertEqual((last.depth, last.pattern_char, last.branch_char), (4, None, None))

    def test_immediate_divergence(self):
        """It should keep one root record when the first symbol leaves the root"""
        corpus, st, decomp = suffix_tree(b"banana")
        traversal = traverse_pattern(st, decomp, corpus.encode(b"zan"))
        self.assertEqual(traversal.end, TraversalEnd.BRANCHING)
        self.assertEqual(traversal.records, [PathRecord(0, 0, corpus.foreign, 1, True)])

    def test_mid_edge(self):
        """It should stop inside an edge at the first mismatch"""
        corpus, st, decomp = suffix_tree(b"banana")
        traversal = traverse_pattern(st, decomp, corpus.encode(b"bax"))
        self.assertEqual(traversal.end, TraversalEnd.MID_EDGE)
        last = traversal.records[-1]
        self.assertEqual((last.depth, last.pattern_char, last.branch_char, last.at_node), (2, corpus.foreign, 3, False))

    def test_full_suffixes(self):
        """It should touch one path per centroid path above the leaf of a whole suffix"""
        raw = CorpusFactory(sigma=3, length=40).raw + b"z"
        corpus, st, decomp = suffix_tree(raw)
        leaf_at = {st.lo[leaf]: leaf for leaf in st.leaves()}
        isa = st.core.isa
        for start in range(1, corpus.n + 1):
            traversal = traverse_pattern(st, decomp, corpus.codes[start:])
            self.assertEqual(traversal.end, TraversalEnd.EXHAUSTED)
            self.assertEqual(traversal.t, decomp.paths_to_root(st, leaf_at[isa[start]]))

    def test_empty_pattern(self):
        """It should refuse to walk an empty pattern"""
        _, st, decomp = suffix_tree(b"banana")
        self.assertRaises(DataValidationError, traverse_pattern, st, decomp, ())


######################################################################
#  C E N T R O I D   E N G I N E   T E S T   C A S E S
######################################################################
class TestCentroidEngine(TestCase):
    """CentroidEngine Test Cases"""

    @classmethod
    def setUpClass(cls):
        """This runs once before the entire test suite"""
        app.config["TESTING"] = True
        app.logger.setLevel(logging.CRITICAL)
        app.app_context().push()

    def setUp(self):
        reseed_random(2718)

    def test_banana(self):
        """It should answer nana over banana like the small engine"""
        engine = CentroidEngine.build(TextCorpus(b"banana"), 4)
        self.assertEqual(engine.query(b"nana"), BANANA_NANA)
        self.assertEqual(query_one_error_large(engine, b"nana"), BANANA_NANA)

    def test_one_search_per_color(self):
        """It should run one modified-pattern search per distinct color of a range"""
        engine = CentroidEngine.build(TextCorpus(b"xabyab"), 3)
        ctx = engine.small.prepare(b"zab")
        record = traverse_pattern(engine.st, engine.decomp, ctx.q[1:]).records[0]
        self.assertEqual(record.path, 0)
        sub2 = engine.tree(0, CorrectionKind.SUB2)
        form = EditDescriptor.substitution(1, engine.corpus.wildcard)
        with patch.object(engine.small, "query_modified_pattern", wraps=engine.small.query_modified_pattern) as spy:
            found = engine.query_correction_tree(sub2, ctx, form, record)
        self.assertEqual(spy.call_count, 2)
        self.assertEqual({(match.start, match.length) for match in found}, {(1, 3), (4, 3)})
        matches = engine.query(b"zab")
        self.assertEqual({(match.start, match.length) for match in matches}, {(1, 3), (4, 3), (2, 2), (5, 2)})

    def test_matches_oracle(self):
        """It should agree with the brute-force oracle on random texts"""
        for sigma in (1, 2, 4, 26, 256, 1000):
            for _ in range(3):
                corpus = CorpusFactory(sigma=sigma, length=randgen.randint(1, 60))
                engine = CentroidEngine.build(corpus, 6)
                for _ in range(15):
                    pattern = random_pattern(corpus.raw, 6)
                    found = {(match.start, match.length) for match in engine.query(pattern)}
                    self.assertEqual(found, oracle_query(corpus.raw, pattern), f"{corpus.raw!r} {pattern!r}")

    def test_same_answers_as_small_engine(self):
        """It should report the same matches and edits as the small engine"""
        for sigma in (2, 3, 8):
            corpus = CorpusFactory(sigma=sigma, length=70)
            large = CentroidEngine.build(corpus, 7, seed=3)
            small = SmallEngine.build(corpus, 7, seed=3)
            for _ in range(25):
                pattern = random_pattern(corpus.raw, 7)
                self.assertEqual(large.query(pattern), small.query(pattern), f"{corpus.raw!r} {pattern!r}")

    def test_query_cost_independent_of_text_size(self):
        """It should spend at most twice the probes on a pattern as the text grows sixteen-fold"""
        patterns = [random_symbols(4, 12) for _ in range(20)]
        costs = []
        for length in (1 << 10, 1 << 12, 1 << 14):
            engine = CentroidEngine.build(CorpusFactory(sigma=4, length=length), 16)
            row = []
            for pattern in patterns:
                probes = ProbeCounter()
                engine.query(pattern, probes)
                row.append(probes.total - probes.reported)
            costs.append(row)
        for pattern, counts in zip(patterns, zip(*costs)):
            self.assertLessEqual(max(counts), 2 * min(counts), f"{pattern!r} {counts}")

    def test_whole_text_patterns(self):
        """It should find a pattern as long as b that spans the text"""
        corpus = TextCorpus(b"abcabd")
        engine = CentroidEngine.build(corpus, 6)
        for pattern in (b"abcabd", b"abcab", b"xbcabd", b"abcabx", b"abcbd", b"bcab"):
            found = {(match.start, match.length) for match in engine.query(pattern)}
            self.assertEqual(found, oracle_query(corpus.raw, pattern))
