"""Import everything for making convenient use of the library possible"""
__version__ = '0.1'

# flake8 doesn't like these imports, but they are needed for other repos
# flake8: noqa
from holosim.base import *
from holosim.model import *
from holosim.behavior import *
from holosim.engine import *
from holosim.holarchy import *
from holosim.holon_algebra import *
from holosim.probability import *
from holosim.scenario import *
from holosim.constants import *
