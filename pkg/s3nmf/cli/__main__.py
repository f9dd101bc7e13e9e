"""Entry point for python -m s3nmf.cli."""

from .main import main

if __name__ == "__main__":
    main()
