"""
cutfem
"""

from cutfem.mesh import *
from cutfem.levelset import *
from cutfem.cut import *
from cutfem.fe_space import *
from cutfem.classification import *
from cutfem.stabilization import *
from cutfem.problems import *
from cutfem.assembly import *
from cutfem.linalg import *
