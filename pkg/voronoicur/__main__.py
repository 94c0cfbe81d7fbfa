import sys

from voronoicur.cli import main

sys.exit(main())
