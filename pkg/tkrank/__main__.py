import sys

from tkrank.cli import main

sys.exit(main())
