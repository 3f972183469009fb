from forge.gateway.prompts import *
from forge.gateway.responses import *
from forge.gateway.backends import *
