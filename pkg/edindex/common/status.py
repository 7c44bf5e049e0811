# coding: utf8
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

"""
Descriptive process exit codes, for code readability.
"""

# Success
EXIT_OK = 0

# A randomized oracle suite found a mismatch
EXIT_VERIFY_FAILED = 1

# Bad arguments, bad input text or patterns, unreadable files
EXIT_USAGE = 2

# The index container could not be read back
EXIT_CORRUPT_INDEX = 3

# The application could not start
EXIT_STARTUP_FAILED = 4
