import sys

from flashsynth.cli import main


sys.exit(main())
