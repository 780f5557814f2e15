import sys

from subfitlab.cli.main import main

sys.exit(main())
