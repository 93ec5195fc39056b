import sys

from stratmorse.main import main

sys.exit(main())
