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
Polynomial Hash

H(x) = x[1]*r + x[2]*r^2 + ... + x[k]*r^k  (mod P)

Queries never build an edited pattern: its hash, and the hash of any of
its prefixes, come in constant time from the prefix and suffix hashes
of the original pattern.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from retry.api import retry_call

from .persistent_base import CapacityError, DataValidationError, HashSeedError

logger = logging.getLogger("edindex")

MERSENNE_61 = (1 << 61) - 1


@dataclass(frozen=True)
class HashParams:
    """Prime modulus and seed shared by every weak prefix search"""

    modulus: int
    seed: int
    attempts: int = field(default=1, compare=False)


def check_capacity(n: int, sigma: int, modulus: int = MERSENNE_61) -> None:
    """Rejects texts for which n^3 (sigma + 2) reaches the modulus"""
    if n**3 * (sigma + 2) >= modulus:
        raise CapacityError(f"Text of length {n} over {sigma} symbols exceeds the hash capacity")


######################################################################
#  E D I T   D E S C R I P T O R S
######################################################################
class EditKind(IntEnum):
    """Edit kinds, in the order used to pick one edit per match"""

    EXACT = 0
    DELETION = 1
    SUBSTITUTION = 2
    INSERTION = 3

    @property
    def label(self) -> str:
        """Short name printed in query output"""
        return ("exact", "del", "sub", "ins")[self]


@dataclass(frozen=True, slots=True)
class EditDescriptor:
    """
    One edit applied to a pattern q of length m

    pos is 1-based; an insertion goes before q[pos], so pos = m + 1
    appends. ch is unused for deletions and exact matches.
    """

    kind: EditKind
    pos: int = 0
    ch: int = 0

    @classmethod
    def exact(cls) -> "EditDescriptor":
        """The pattern unchanged"""
        return cls(EditKind.EXACT)

    @classmethod
    def deletion(cls, pos: int) -> "EditDescriptor":
        """Delete q[pos]"""
        return cls(EditKind.DELETION, pos)

    @classmethod
    def substitution(cls, pos: int, ch: int) -> "EditDescriptor":
        """Replace q[pos] with ch"""
        return cls(EditKind.SUBSTITUTION, pos, ch)

    @classmethod
    def insertion(cls, pos: int, ch: int) -> "EditDescriptor":
        """Insert ch before q[pos]"""
        return cls(EditKind.INSERTION, pos, ch)

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        """Ordering used to choose between edits"""
        return (self.kind, self.pos, self.ch)

    def edited_length(self, m: int) -> int:
        """Length of the edited pattern"""
        if self.kind == EditKind.DELETION:
            return m - 1
        if self.kind == EditKind.INSERTION:
            return m + 1
        return m

    def validate(self, m: int) -> None:
        """Raises DataValidationError when the edit does not fit a pattern of length m"""
        if self.kind == EditKind.EXACT:
            return
        last = m + 1 if self.kind == EditKind.INSERTION else m
        if not 1 <= self.pos <= last:
            raise DataValidationError(f"Edit position {self.pos} outside 1..{last}")


######################################################################
#  H A S H I N G
######################################################################
def hash_string(params: HashParams, x: Sequence[int]) -> int:
    """H(x) evaluated directly"""
    modulus, seed = params.modulus, params.seed
    value, power = 0, 1
    for code in x:
        power = power * seed % modulus
        value = (value + code * power) % modulus
    return value


@dataclass
class QueryHashes:
    """
    Prefix and suffix hashes of one pattern

    pre[i] = H(q[1..i]); suf[i] = H(q[i..m]) hashed as a string of its
    own, so q[i] carries r^1; pow[k] = r^k.
    """

    params: HashParams
    q: List[int]
    pow: List[int]
    pre: List[int]
    suf: List[int]

    @property
    def m(self) -> int:
        """Length of the pattern"""
        return len(self.q) - 1


def precompute_query_hashes(params: HashParams, q: Sequence[int]) -> QueryHashes:
    """Fills pow, pre and suf in one pass each"""
    m = len(q)
    if m < 1:
        raise DataValidationError("Pattern must not be empty")
    modulus, seed = params.modulus, params.seed
    codes = [0] + list(q)
    powers = [1] * (m + 2)
    for k in range(1, m + 2):
        powers[k] = powers[k - 1] * seed % modulus
    pre = [0] * (m + 1)
    for i in range(1, m + 1):
        pre[i] = (pre[i - 1] + codes[i] * powers[i]) % modulus
    suf = [0] * (m + 2)
    for i in range(m, 0, -1):
        suf[i] = (suf[i + 1] + codes[i]) * seed % modulus
    return QueryHashes(params, codes, powers, pre, suf)


def hash_edited(qh: QueryHashes, e: EditDescriptor) -> int:
    """H of the edited pattern, without building it"""
    m = qh.m
    e.validate(m)
    modulus = qh.params.modulus
    pre, suf, powers = qh.pre, qh.suf, qh.pow
    i = e.pos
    if e.kind == EditKind.EXACT:
        return pre[m]
    if e.kind == EditKind.DELETION:
        return (pre[i - 1] + suf[i + 1] * powers[i - 1]) % modulus
    if e.kind == EditKind.SUBSTITUTION:
        return (pre[i - 1] + (e.ch + suf[i + 1]) * powers[i]) % modulus
    return (pre[i - 1] + (e.ch + suf[i]) * powers[i]) % modulus


def hash_edited_prefix(qh: QueryHashes, e: EditDescriptor, j: int) -> int:
    """H of the first j symbols of the edited pattern"""
    m = qh.m
    if not 0 <= j <= e.edited_length(m):
        raise DataValidationError(f"Prefix length {j} outside the edited pattern")
    if e.kind == EditKind.EXACT or j < e.pos:
        return qh.pre[j]
    whole = hash_edited(qh, e)
    modulus = qh.params.modulus
    if e.kind == EditKind.DELETION:
        tail = qh.suf[j + 2]
    elif e.kind == EditKind.SUBSTITUTION:
        tail = qh.suf[j + 1]
    else:
        tail = qh.suf[j]
    return (whole - tail * qh.pow[j]) % modulus


######################################################################
#  S E E D   S E L E C T I O N
######################################################################
def _shared_prefixes(members: Sequence[Sequence[int]]) -> List[int]:
    """Length shared by each member with its predecessor; rejects repeats"""
    shared = [0] * len(members)
    for k in range(1, len(members)):
        previous, current = members[k - 1], members[k]
        length = 0
        limit = min(len(previous), len(current))
        while length < limit and previous[length] == current[length]:
            length += 1
        if length == len(previous) == len(current):
            raise DataValidationError(f"Duplicate hash input at position {k}")
        shared[k] = length
    return shared


def _collides(params: HashParams, members: Sequence[Sequence[int]], shared: Sequence[int]) -> bool:
    """True when two distinct prefixes of the same length share a hash"""
    modulus, seed = params.modulus, params.seed
    seen = set()
    for member, common in zip(members, shared):
        value, power = 0, 1
        for length, code in enumerate(member, start=1):
            power = power * seed % modulus
            value = (value + code * power) % modulus
            if length > common:
                key = (length, value)
                if key in seen:
                    return True
                seen.add(key)
    return False


def find_injective_seed(
    member_sets: Iterable[Sequence[Sequence[int]]],
    n: int,
    sigma: int,
    rng: np.random.Generator,
    max_retries: int = 32,
) -> HashParams:
    """
    Draws seeds until every stored prefix hashes without collision

    Each member set is sorted and holds distinct strings; the strings
    checked are all of their prefixes, compared length by length within
    the set. One seed serves every set.
    """
    check_capacity(n, sigma)
    families = [(members, _shared_prefixes(members)) for members in member_sets]
    attempts = 0

    def attempt() -> HashParams:
        nonlocal attempts
        attempts += 1
        params = HashParams(MERSENNE_61, int(rng.integers(1, MERSENNE_61)))
        for members, shared in families:
            if _collides(params, members, shared):
                raise HashSeedError(f"Seed {params.seed} maps two stored prefixes together")
        return params

    params = retry_call(attempt, exceptions=HashSeedError, tries=max_retries, delay=0, logger=logger)
    logger.info("Hash seed found after %d attempt(s) over %d structure(s)", attempts, len(families))
    return replace(params, attempts=attempts)
