# idemquat.py - Main entry point: python idemquat.py <command> --ring <spec> ...
from src.interface.cli import run

if __name__ == "__main__":
    run()
