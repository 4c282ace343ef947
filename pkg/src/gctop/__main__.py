import sys

from gctop.cli import main

sys.exit(main())
