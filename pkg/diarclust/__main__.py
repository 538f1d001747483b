import sys

from diarclust.main import main

sys.exit(main())
