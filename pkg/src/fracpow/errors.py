"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter lies outside its documented domain."""


class ConstructionError(RuntimeError):
    """A numerical construction failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class EigenSolverError(SolverError):
    """An eigenvalue iteration failed to converge."""


class RootSearchError(RuntimeError):
    """A root bracketing search was exhausted before finding enough roots."""


class MeshFormatError(ValueError):
    """A mesh file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MeshValidationError(ValueError):
    """A mesh violates a structural invariant."""


class AssemblyError(RuntimeError):
    """Finite element assembly failed."""


class DivergenceError(RuntimeError):
    """A time-stepping run produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
