from forge.frontend.c_parser import *
from forge.frontend.symbol_graph import *
