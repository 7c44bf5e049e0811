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
Probe counters

Queries charge every hash-map lookup, positional array read and
range-minimum call to a ProbeCounter so that output sensitivity can be
measured instead of timed.
"""
from dataclasses import dataclass, fields


@dataclass
class ProbeCounter:
    """Counts the probes made while answering one or more queries"""

    hash_probes: int = 0
    array_probes: int = 0
    color_probes: int = 0
    reported: int = 0

    @property
    def total(self) -> int:
        """Every probe, reporting included"""
        return self.hash_probes + self.array_probes + self.color_probes + self.reported

    def serialize(self) -> dict:
        """Converts the counter into a dictionary"""
        return {field.name: getattr(self, field.name) for field in fields(self)} | {"total": self.total}
