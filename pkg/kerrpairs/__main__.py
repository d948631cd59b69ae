# kerrpairs/__main__.py
import sys

from kerrpairs.cli import main

sys.exit(main())
