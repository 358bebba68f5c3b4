"""
Exceptions raised by cutfem. Every error is printed with
print_error_msg before it is raised.
"""
from cutfem.utils import print_error_msg

class CutFEMError(Exception):
    """Base class of all cutfem errors."""

class ConfigurationError(CutFEMError, ValueError):
    """Invalid configuration or parameter value."""

class EmptyDomainError(CutFEMError, ValueError):
    """The level set has no negative values on the background mesh."""

class UnsupportedOrderError(CutFEMError, ValueError):
    """Requested quadrature order is not tabulated."""

class ContractViolationError(CutFEMError, ValueError):
    """A precondition of an operation does not hold."""

class UnusableGeometryError(CutFEMError):
    """No large element available to anchor the stabilization."""

class InternalConsistencyError(CutFEMError):
    """Data structures disagree with each other."""

class UnsupportedOperationError(CutFEMError):
    """Operation needs data that was not provided."""

class NonConvergenceError(CutFEMError):
    """
    An iterative method hit its iteration cap.

    Attributes
    ----------
    * report                        : (SolveReport) State of the iteration when it stopped.
    """

    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report

def fail(error_class, msg, *args):
    """
    Prints the message in red and raises error_class(msg).
    """
    print_error_msg(msg)
    raise error_class(msg, *args)
