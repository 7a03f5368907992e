__author__ = "Aurélien Costes"
__credits__ = ["Aurélien Costes"]
__license__ = "MIT"
__version__ = "0.1.0"
__maintainer__ = "Aurélien Costes"
__email__ = "aurelien.costes31@gmail.com"

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

from . import hermitian
from . import forms
from . import cohomology
from . import solver
from . import currents
