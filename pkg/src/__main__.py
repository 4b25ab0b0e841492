# __main__.py

import sys


def main() -> None:
    """
    Entry point of the Frobenius Workbench executable.

    The CLI is imported lazily so `--help` stays fast and the exit code of
    the chosen command becomes the process exit code.
    """
    from app.main_cli import MainCLI

    sys.exit(MainCLI().run(sys.argv[1:]))


if __name__ == "__main__":
    main()
