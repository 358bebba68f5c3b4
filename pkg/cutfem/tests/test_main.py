from cutfem.tests.utils_tests import *
from cutfem.tests.mesh_tests import *
from cutfem.tests.cut_tests import *
from cutfem.tests.fe_space_tests import *
from cutfem.tests.classification_tests import *
from cutfem.tests.stabilization_tests import *
from cutfem.tests.assembly_tests import *
from cutfem.tests.linalg_tests import *
from cutfem.tests.config_cli_tests import *
from cutfem.tests.experiments_tests import *
