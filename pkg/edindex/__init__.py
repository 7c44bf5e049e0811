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
Package: edindex
Full-text index answering edit-distance-one pattern queries
This module creates and configures the Flask app, sets up the logging
and registers the index commands
"""
import sys
from flask import Flask
from edindex import config
from edindex.common import log_handlers


############################################################
# Initialize the Flask instance
############################################################
def create_app():
    """Initialize the core application."""
    app = Flask(__name__)
    app.config.from_object(config)

    with app.app_context():
        # pylint: disable=import-outside-toplevel
        try:
            from edindex import models  # noqa: F401
            from edindex.common import cli_commands
        except Exception as error:  # pylint: disable=broad-except
            app.logger.critical("%s: Cannot continue", error)
            sys.exit(4)

        for command in cli_commands.COMMANDS:
            app.cli.add_command(command)

        # Set up logging for the command line
        log_handlers.init_logging(app, app.config["LOGGING_LEVEL"])

        app.logger.info(70 * "*")
        app.logger.info("  E D I N D E X   R E A D Y  ".center(70, "*"))
        app.logger.info(70 * "*")

        app.logger.info("Index commands registered!")

        return app
