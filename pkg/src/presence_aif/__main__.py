import sys

from presence_aif.cli import main

sys.exit(main())
