# CONSTANTS
from forge.constants import *
# UTILS
from forge.externals import *
# PIPELINE STAGES
from forge.frontend import *
from forge.mockups import *
from forge.verifier import *
from forge.gateway import *
from forge.harness import *
from forge.reflection import *
# ORCHESTRATION
from forge.config import *
from forge.statistics import *
from forge.reports import *
from forge.pipeline import *
