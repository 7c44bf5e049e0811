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
Module: error_handlers

Maps the exceptions a command can raise onto process exit codes
"""
import functools
import sys

import click
from flask import current_app as app  # Import Flask application

from edindex.models import CorruptIndexError, DataValidationError
from . import status

# Most specific first
ERROR_STATUS = (
    (CorruptIndexError, status.EXIT_CORRUPT_INDEX),
    (DataValidationError, status.EXIT_USAGE),
    (OSError, status.EXIT_USAGE),
)


def exit_status(error: Exception) -> int:
    """Exit code for an exception raised by a command; anything unexpected is fatal"""
    for error_class, code in ERROR_STATUS:
        if isinstance(error, error_class):
            return code
    return status.EXIT_STARTUP_FAILED


def handle_errors(command):
    """Turns handled exceptions into a one-line diagnostic and an exit code"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except tuple(error_class for error_class, _ in ERROR_STATUS) as error:
            message = str(error)
            app.logger.warning(message)
            click.echo(f"Error: {message}", err=True)
            sys.exit(exit_status(error))

    return wrapper
