import sys

from src.utils.logging import setup_logging
from src.views.cli import main as run_cli


def main() -> None:
    setup_logging()
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
