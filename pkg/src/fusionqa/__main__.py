import sys

from fusionqa.cli import main

sys.exit(main())
