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
Brute-force reference answers

Shares no code with the engines. Used by the verify
command and by the tests.
"""
from typing import Sequence, Set, Tuple, Union

import numpy as np

Symbols = Union[bytes, Sequence[int]]


def edit_distance_at_most_one(a: Symbols, b: Symbols) -> bool:
    """True when a and b are equal or one edit apart, in linear time"""
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    shortest = min(la, lb)
    head = 0
    while head < shortest and a[head] == b[head]:
        head += 1
    tail = 0
    while tail < shortest - head and a[la - 1 - tail] == b[lb - 1 - tail]:
        tail += 1
    return max(la, lb) - head - tail <= 1


def edit_distance(a: Symbols, b: Symbols) -> int:
    """Levenshtein distance by dynamic programming"""
    distances = np.zeros((len(a) + 1, len(b) + 1), dtype=np.int64)
    distances[:, 0] = np.arange(len(a) + 1)
    distances[0, :] = np.arange(len(b) + 1)
    for i in range(len(a)):
        for j in range(len(b)):
            diff = 0 if a[i] == b[j] else 1
            # deletion, insertion, identity or replacement
            distances[i + 1, j + 1] = min(distances[i + 1, j] + 1, distances[i, j + 1] + 1, distances[i, j] + diff)
    return int(distances[len(a), len(b)])


def oracle_query(text: Symbols, q: Symbols) -> Set[Tuple[int, int]]:
    """Every (start, length), 1-based, of a substring within one edit of q"""
    n, m = len(text), len(q)
    found = set()
    for length in (m - 1, m, m + 1):
        if length < 1:
            continue
        for start in range(1, n - length + 2):
            if edit_distance_at_most_one(text[start - 1 : start - 1 + length], q):
                found.add((start, length))
    return found


def dp_oracle_query(text: Symbols, q: Symbols) -> Set[Tuple[int, int]]:
    """oracle_query recomputed with full edit distances"""
    n, m = len(text), len(q)
    return {
        (start, length)
        for length in range(max(1, m - 1), m + 2)
        for start in range(1, n - length + 2)
        if edit_distance(text[start - 1 : start - 1 + length], q) <= 1
    }

