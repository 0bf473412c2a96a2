import sys

from floquet_engineering.cli import main

sys.exit(main())
