import sys

from fourier_haar.cli import main

sys.exit(main())
