"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside its domain.

    ``param`` names the offending argument so front ends can report it.
    """

    def __init__(self, param, message):
        super().__init__(f"{param}: {message}")
        self.param = param


class CapacityError(RuntimeError):
    """A request exceeds an enumeration guard (e.g. n! or 2**n states)."""


class ContractError(TypeError):
    """An operation received an object that breaks its calling contract."""
