"""Main entry point for the dist_cospectra package."""

from dist_cospectra.cli import main

if __name__ == "__main__":
    main()
