from forge.harness.suite import *
from forge.harness.runner import *
from forge.harness.coverage import *
