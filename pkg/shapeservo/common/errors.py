# Catch all for our own errors
class AppError(Exception):
    pass


# Raised when a contour cannot be built, resampled or compared
class ContourError(AppError):
    pass


# Raised when the cable statics solver fails to converge
class SolverError(AppError):
    def __init__(self, message, residual=None):
        super(SolverError, self).__init__(message)
        self.residual = residual


# Raised when a cable boundary cannot be satisfied by an inextensible rod
class UnreachablePoseError(AppError):
    pass


# Raised when a PCA window carries no shape variation
class DegenerateWindowError(AppError):
    pass


# Raised when an interaction model cannot be estimated or used
class EstimationError(AppError):
    pass


# Raised when the control law produces an unusable motion
class ControlError(AppError):
    pass


# Raised when a servo run fails, remembers where
class ServoError(AppError):
    def __init__(self, message, iteration=None):
        super(ServoError, self).__init__(message)
        self.iteration = iteration


# Raised for invalid scenario or study configuration
class ConfigError(AppError):
    pass
