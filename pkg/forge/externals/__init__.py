from forge.externals.iterable_utils import *
from forge.externals.miscellaneous import *
from forge.externals.process_utils import *
