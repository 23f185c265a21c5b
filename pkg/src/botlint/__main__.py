import sys

from botlint.cli import main

sys.exit(main())
