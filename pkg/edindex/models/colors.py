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
Distinct colors in a range

Each position remembers the last earlier position of its color. The
positions of [l, r] whose predecessor lies before l carry every color of
the range exactly once; a range-minimum structure over the predecessors
finds them one at a time.
"""
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .persistent_base import DataValidationError
from .probes import ProbeCounter


def _ilog2(value: int) -> int:
    """Integral part of the base-2 logarithm of a positive integer"""
    return value.bit_length() - 1


class RangeMinQuery:  # pylint: disable=too-few-public-methods
    """
    Position of the minimum in a range, from a sparse table

    table[k][i] holds the position of the minimum of data[i:i + 2**k].
    Ties go to the leftmost position.
    """

    def __init__(self, data: Sequence[int]):
        values = np.asarray(data, dtype=np.int64)
        self.values = values
        length = len(values)
        self.table: List[np.ndarray] = [np.arange(length, dtype=np.int64)]
        for depth in range(1, _ilog2(length) + 1 if length else 0):
            previous = self.table[depth - 1]
            half = 1 << (depth - 1)
            left = previous[: length - (1 << depth) + 1]
            right = previous[half : half + len(left)]
            self.table.append(np.where(values[right] < values[left], right, left))

    def __call__(self, start: int, stop: int) -> Optional[int]:
        """Position of the minimum of data[start:stop], None when empty"""
        if start >= stop:
            return None
        depth = _ilog2(stop - start)
        left = int(self.table[depth][start])
        right = int(self.table[depth][stop - (1 << depth)])
        return right if self.values[right] < self.values[left] else left


class ColorReporter:
    """Reports each color of a range once, in output-sensitive time"""

    def __init__(self, colors: Sequence[int]):
        self.colors = list(colors)
        last_seen = {}
        self.previous = [0] * len(self.colors)
        for index in range(1, len(self.colors)):
            color = self.colors[index]
            self.previous[index] = last_seen.get(color, 0)
            last_seen[color] = index
        self.rmq = RangeMinQuery(self.previous)

    def __len__(self):
        return len(self.colors) - 1

    def distinct(self, lo: int, hi: int, probes: Optional[ProbeCounter] = None) -> Iterator[int]:
        """
        Every distinct color at positions lo..hi (1-based)

        Each color costs at most two range-minimum calls, plus one for an
        empty range.
        """
        if lo > hi:
            return
        if lo < 1 or hi > len(self):
            raise DataValidationError(f"Color range [{lo}, {hi}] outside 1..{len(self)}")
        pending = [(lo, hi)]
        while pending:
            start, end = pending.pop()
            if probes is not None:
                probes.color_probes += 1
            position = self.rmq(start, end + 1)
            if self.previous[position] >= lo:
                continue
            yield self.colors[position]
            if position < end:
                pending.append((position + 1, end))
            if position > start:
                pending.append((start, position - 1))


def report_distinct_colors(
    colors: Sequence[int], lo: int, hi: int, probes: Optional[ProbeCounter] = None
) -> List[int]:
    """Distinct colors of colors[lo..hi], in the order they are found"""
    return list(ColorReporter(colors).distinct(lo, hi, probes))
