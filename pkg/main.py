import sys

from lab.qkd.infraestructure.cli import main


if __name__ == "__main__":
    sys.exit(main())
