from forge.verifier.counterexample import *
from forge.verifier.checker import *
from forge.verifier.summary import *
