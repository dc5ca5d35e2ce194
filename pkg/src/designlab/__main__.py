"""python -m designlab"""
from designlab.cli import main

if __name__ == "__main__":
    main()
