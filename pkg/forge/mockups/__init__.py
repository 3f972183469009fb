from forge.mockups.stubs import *
from forge.mockups.mockup import *
