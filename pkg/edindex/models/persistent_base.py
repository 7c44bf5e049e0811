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
Persistent Base class for index structures

Every structure that lands in an index container serializes itself
through a BinaryWriter and is rebuilt from a BinaryReader. All integers
are little-endian and fixed width; arrays are length-prefixed.
"""
import logging
import struct
from abc import abstractmethod
from typing import Iterable, List

import numpy as np

logger = logging.getLogger("edindex")


class DataValidationError(Exception):
    """Used for data validation errors on texts, patterns and parameters"""


class CapacityError(DataValidationError):
    """Used when a text is too large for the hash modulus"""


class PatternTooLongError(DataValidationError):
    """Used when a query pattern exceeds the build parameter b"""


class HashSeedError(DataValidationError):
    """Used when no injective hash seed was found within the retry cap"""


class CorruptIndexError(DataValidationError):
    """Used when an index container cannot be read back"""


######################################################################
#  B I N A R Y   W R I T E R
######################################################################
class BinaryWriter:
    """Accumulates little-endian fields"""

    def __init__(self):
        self._parts: List[bytes] = []

    def u32(self, value: int) -> None:
        """Writes an unsigned 32-bit integer"""
        self._parts.append(struct.pack("<I", value))

    def u64(self, value: int) -> None:
        """Writes an unsigned 64-bit integer"""
        self._parts.append(struct.pack("<Q", value))

    def array(self, values: Iterable[int]) -> None:
        """Writes a length-prefixed array of signed 64-bit integers"""
        data = np.asarray(list(values), dtype="<i8")
        self.u64(len(data))
        self._parts.append(data.tobytes())

    def raw(self, data: bytes) -> None:
        """Writes bytes as they are"""
        self._parts.append(bytes(data))

    def getvalue(self) -> bytes:
        """Returns everything written so far"""
        return b"".join(self._parts)


######################################################################
#  B I N A R Y   R E A D E R
######################################################################
class BinaryReader:
    """Reads fields back in the order a BinaryWriter wrote them"""

    def __init__(self, data: bytes):
        self._data = memoryview(data)
        self._offset = 0

    def _take(self, size: int) -> memoryview:
        if size < 0 or self._offset + size > len(self._data):
            raise CorruptIndexError(f"Index truncated at byte {self._offset}")
        chunk = self._data[self._offset : self._offset + size]
        self._offset += size
        return chunk

    def u32(self) -> int:
        """Reads an unsigned 32-bit integer"""
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        """Reads an unsigned 64-bit integer"""
        return struct.unpack("<Q", self._take(8))[0]

    def array(self) -> List[int]:
        """Reads a length-prefixed array of signed 64-bit integers"""
        length = self.u64()
        if length > len(self._data):
            raise CorruptIndexError(f"Array length {length} is out of range")
        return np.frombuffer(self._take(8 * length), dtype="<i8").tolist()

    def raw(self, size: int) -> bytes:
        """Reads size bytes"""
        return bytes(self._take(size))

    @property
    def offset(self) -> int:
        """Number of bytes consumed"""
        return self._offset

    def at_end(self) -> bool:
        """True when every byte has been consumed"""
        return self._offset == len(self._data)


######################################################################
#  P E R S I S T E N T   B A S E   M O D E L
######################################################################
class PersistentBase:
    """Base class for structures stored in an index container"""

    @abstractmethod
    def serialize(self, writer: BinaryWriter) -> None:
        """Writes the structure to a BinaryWriter"""

    @classmethod
    @abstractmethod
    def deserialize(cls, reader: BinaryReader) -> "PersistentBase":
        """Rebuilds the structure from a BinaryReader"""
