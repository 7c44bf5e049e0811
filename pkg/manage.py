"""
Command line entry point

Run the index commands with ``flask --app manage <command>``
"""
from edindex import create_app

app = create_app()

if __name__ == "__main__":
    app.cli.main()
