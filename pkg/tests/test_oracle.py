"""
Test cases for the brute-force oracle
"""
from unittest import TestCase
from factory.random import reseed_random
from edindex.models import edit_distance, edit_distance_at_most_one, oracle_query
from edindex.models.oracle import dp_oracle_query
from tests.factories import random_pattern, random_symbols


class TestOracle(TestCase):
    """Oracle Test Cases"""

    def setUp(self):
        reseed_random(12)

    def test_edit_distance(self):
        """It should compute Levenshtein distances"""
        self.assertEqual(edit_distance(b"kitten", b"sitting"), 3)
        self.assertEqual(edit_distance(b"", b"abc"), 3)
        self.assertEqual(edit_distance([1, 2, 3], [1, 3]), 1)
        self.assertEqual(edit_distance(b"same", b"same"), 0)

    def test_at_most_one(self):
        """It should tell strings one edit apart in a single scan"""
        self.assertTrue(edit_distance_at_most_one(b"nana", b"nana"))
        self.assertTrue(edit_distance_at_most_one(b"nana", b"bana"))
        self.assertTrue(edit_distance_at_most_one(b"nana", b"ana"))
        self.assertTrue(edit_distance_at_most_one(b"nana", b"anana"))
        self.assertFalse(edit_distance_at_most_one(b"nana", b"anan"))
        self.assertFalse(edit_distance_at_most_one(b"nana", b"na"))

    def test_banana(self):
        """It should list the substrings of banana within one edit of nana"""
        self.assertEqual(oracle_query(b"banana", b"nana"), {(1, 4), (2, 3), (2, 5), (3, 3), (3, 4), (4, 3)})
        self.assertEqual(oracle_query(b"banana", b"x"), {(start, 1) for start in range(1, 7)})
        self.assertEqual(oracle_query(b"ab", b"abcd"), set())

    def test_agrees_with_dynamic_programming(self):
        """It should agree with full edit distances on random inputs"""
        for sigma in (2, 3, 5):
            raw = random_symbols(sigma, 30)
            for _ in range(20):
                pattern = random_pattern(raw, 6)
                self.assertEqual(oracle_query(raw, pattern), dp_oracle_query(raw, pattern))
