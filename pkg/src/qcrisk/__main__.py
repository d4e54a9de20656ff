import sys

from qcrisk.cli import main

sys.exit(main())
