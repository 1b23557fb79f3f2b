from liecert.main import main
import sys

sys.exit(main())
