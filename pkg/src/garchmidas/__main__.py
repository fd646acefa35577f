import sys

from garchmidas.cli import main

sys.exit(main())
