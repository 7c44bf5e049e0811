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
Test cases for the Small Alphabet Engine
"""
import logging
from unittest import TestCase
from factory.random import reseed_random
from manage import app
from edindex.models import (
    DataValidationError,
    EditDescriptor,
    EditKind,
    Occurrence,
    PatternTooLongError,
    ProbeCounter,
    SmallEngine,
    TextCorpus,
    check_occurrence,
    oracle_query,
    query_one_error_small,
)
from edindex.models.engine_small import canonical_matches
from edindex.models.text_core import compute_left_right
from tests.factories import CorpusFactory, random_pattern

BANANA_NANA = [
    Occurrence(1, 4, EditDescriptor.substitution(1, 2)),
    Occurrence(2, 3, EditDescriptor.deletion(1)),
    Occurrence(2, 5, EditDescriptor.insertion(1, 1)),
    Occurrence(3, 3, EditDescriptor.deletion(4)),
    Occurrence(3, 4, EditDescriptor.exact()),
    Occurrence(4, 3, EditDescriptor.deletion(1)),
]


######################################################################
#  S M A L L   E N G I N E   T E S T   C A S E S
######################################################################
class TestSmallEngine(TestCase):
    """SmallEngine Test Cases"""

    @classmethod
    def setUpClass(cls):
        """This runs once before the entire test suite"""
        app.config["TESTING"] = True
        app.logger.setLevel(logging.CRITICAL)
        app.app_context().push()
        cls.banana = SmallEngine.build(TextCorpus(b"banana"), 4)

    def setUp(self):
        reseed_random(31)

    def test_banana(self):
        """It should find every substring of banana within one edit of nana"""
        self.assertEqual(self.banana.query(b"nana"), BANANA_NANA)
        self.assertEqual(query_one_error_small(self.banana, b"nana"), BANANA_NANA)

    def test_width(self):
        """It should store factors one symbol longer than b"""
        self.assertEqual(self.banana.width, 5)
        self.assertEqual(self.banana.sums.total, 6)

    def test_check_occurrence(self):
        """It should test one edited pattern at one text position"""
        core = self.banana.core
        left, right = compute_left_right(core, (3, 1, 3, 1))
        self.assertTrue(check_occurrence(core, left, right, EditDescriptor.exact(), 3))
        self.assertFalse(check_occurrence(core, left, right, EditDescriptor.exact(), 1))
        self.assertFalse(check_occurrence(core, left, right, EditDescriptor.exact(), 4))
        self.assertTrue(check_occurrence(core, left, right, EditDescriptor.substitution(1, 2), 1))
        self.assertFalse(check_occurrence(core, left, right, EditDescriptor.substitution(1, 1), 1))
        self.assertTrue(check_occurrence(core, left, right, EditDescriptor.deletion(4), 3))
        self.assertTrue(check_occurrence(core, left, right, EditDescriptor.deletion(1), 2))
        self.assertTrue(check_occurrence(core, left, right, EditDescriptor.insertion(1, 1), 2))
        self.assertFalse(check_occurrence(core, left, right, EditDescriptor.insertion(5, 1), 3))
        self.assertFalse(check_occurrence(core, left, right, EditDescriptor.exact(), 0))

    def test_check_occurrence_counts_reads(self):
        """It should charge its array reads to the probe counter"""
        core = self.banana.core
        left, right = compute_left_right(core, (3, 1, 3, 1))
        probes = ProbeCounter()
        check_occurrence(core, left, right, EditDescriptor.substitution(2, 1), 3, probes)
        self.assertEqual(probes.array_probes, 4)

    def test_query_modified_pattern(self):
        """It should list every suffix starting with an edited pattern"""
        ctx = self.banana.prepare(b"nana")
        found = self.banana.query_modified_pattern(ctx, EditDescriptor.deletion(1))
        self.assertEqual(sorted(match.start for match in found), [2, 4])
        self.assertTrue(all(match.length == 3 for match in found))
        self.assertEqual(self.banana.query_modified_pattern(ctx, EditDescriptor.substitution(2, 3)), [])
        self.assertEqual(self.banana.query_modified_pattern(ctx, EditDescriptor.substitution(1, 4)), [])
        self.assertGreater(ctx.probes.hash_probes, 0)

    def test_canonical_edits(self):
        """It should name deletions and insertions inside a run by the run's first position"""
        ctx = SmallEngine.build(TextCorpus(b"abba"), 4).prepare(b"abba")
        self.assertEqual(ctx.run_start, [0, 1, 2, 2, 4])
        self.assertEqual(ctx.canonical(EditDescriptor.deletion(3)), EditDescriptor.deletion(2))
        self.assertEqual(ctx.canonical(EditDescriptor.insertion(4, 2)), EditDescriptor.insertion(2, 2))
        self.assertEqual(ctx.canonical(EditDescriptor.insertion(3, 1)), EditDescriptor.insertion(3, 1))
        self.assertEqual(ctx.canonical(EditDescriptor.substitution(3, 1)), EditDescriptor.substitution(3, 1))

    def test_canonical_matches(self):
        """It should keep the smallest edit for each substring"""
        matches = canonical_matches(
            [
                Occurrence(2, 3, EditDescriptor.substitution(1, 2)),
                Occurrence(1, 3, EditDescriptor.exact()),
                Occurrence(2, 3, EditDescriptor.exact()),
            ]
        )
        self.assertEqual(matches, [Occurrence(1, 3, EditDescriptor.exact()), Occurrence(2, 3, EditDescriptor.exact())])

    def test_absent_symbols(self):
        """It should match a pattern holding a symbol the text lacks only through that symbol"""
        self.assertEqual(self.banana.query(b"nzna"), [Occurrence(3, 4, EditDescriptor.substitution(2, 1))])
        self.assertEqual(
            self.banana.query(b"zna"),
            [
                Occurrence(2, 3, EditDescriptor.substitution(1, 1)),
                Occurrence(3, 2, EditDescriptor.deletion(1)),
                Occurrence(4, 3, EditDescriptor.substitution(1, 1)),
                Occurrence(5, 2, EditDescriptor.deletion(1)),
            ],
        )
        self.assertEqual(self.banana.query(b"zz"), [])

    def test_bad_patterns(self):
        """It should refuse empty patterns and patterns longer than b"""
        self.assertRaises(DataValidationError, self.banana.query, b"")
        with self.assertRaises(PatternTooLongError) as raised:
            self.banana.query(b"banana")
        self.assertIn("b=4", str(raised.exception))

    def test_bad_b(self):
        """It should not build with b below one"""
        self.assertRaises(DataValidationError, SmallEngine.build, TextCorpus(b"banana"), 0)

    def test_matches_oracle(self):
        """It should agree with the brute-force oracle on random texts"""
        for sigma in (2, 4, 26):
            for _ in range(4):
                corpus = CorpusFactory(sigma=sigma, length=50)
                engine = SmallEngine.build(corpus, 6)
                for _ in range(15):
                    pattern = random_pattern(corpus.raw, 6)
                    found = {(match.start, match.length) for match in engine.query(pattern)}
                    self.assertEqual(found, oracle_query(corpus.raw, pattern), f"{corpus.raw!r} {pattern!r}")

    def test_reported_edits_spell_the_match(self):
        """It should report an edit that turns the pattern into the matched substring"""
        corpus = CorpusFactory(sigma=3, length=40)
        engine = SmallEngine.build(corpus, 5)
        for _ in range(20):
            pattern = random_pattern(corpus.raw, 5)
            q = list(corpus.encode(pattern))
            for match in engine.query(pattern):
                e = match.edit
                if e.kind == EditKind.DELETION:
                    edited = q[: e.pos - 1] + q[e.pos :]
                elif e.kind == EditKind.SUBSTITUTION:
                    edited = q[: e.pos - 1] + [e.ch] + q[e.pos :]
                elif e.kind == EditKind.INSERTION:
                    edited = q[: e.pos - 1] + [e.ch] + q[e.pos - 1 :]
                else:
                    edited = q
                self.assertEqual(corpus.codes[match.start : match.start + match.length], edited)

    def test_probe_counts(self):
        """It should count the work of a query"""
        probes = ProbeCounter()
        self.banana.query(b"nana", probes)
        self.assertEqual(probes.reported, 6)
        self.assertGreater(probes.total, probes.reported)
        self.assertEqual(probes.serialize()["total"], probes.total)
