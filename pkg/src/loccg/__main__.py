import sys

from loccg.cli import main

sys.exit(main())
