import sys

from .v1.zsvr_cli import main

sys.exit(main())
