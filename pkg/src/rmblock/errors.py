"""Exception hierarchy.

Every error raised by the library derives from ``RmblockError`` and carries an
``exit_code`` used by the command line front end: 1 for bad configuration, 2 for
numerical failure, 3 for I/O.
"""


class RmblockError(Exception):
    exit_code = 2


class ConfigError(RmblockError, ValueError):
    exit_code = 1


class NumericError(RmblockError, ArithmeticError):
    exit_code = 2


# profile validation
class NonSquare(ConfigError):
    pass


class NegativeEntry(ConfigError):
    pass


class AsymmetricBeyondTolerance(ConfigError):
    pass


class UnsupportedK(ConfigError):
    pass


class NoSupport(ConfigError):
    pass


class Reducible(ConfigError):
    pass


class DomainError(ConfigError):
    pass


# numerics
class NoConvergence(NumericError):
    pass


class WrongBranch(NumericError):
    pass


class FitDegenerate(NumericError):
    pass


class ZeroComponent(NumericError):
    pass


class QuadratureOverflow(NumericError):
    pass


class NotConverged(NumericError):
    pass


class PoleParameter(ConfigError):
    pass


class BranchCut(DomainError):
    pass


class NonConvergent(NumericError):
    pass


class SeriesNotConverged(NumericError):
    pass


class SingularAtZero(DomainError):
    pass


class InvalidProblem(ConfigError):
    pass


class QuadratureFailure(NumericError):
    pass


class IOFailure(RmblockError, OSError):
    exit_code = 3
