import sys

from memsys_evo.cli import main


sys.exit(main())
