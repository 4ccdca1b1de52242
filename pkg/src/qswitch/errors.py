"""Exception hierarchy shared across the package."""


class QSwitchError(Exception):
    """Base class for all errors raised by qswitch."""


class DomainError(QSwitchError, ValueError):
    """An argument lies outside the operation's domain."""


class StructuralError(QSwitchError, ValueError):
    """A gate or circuit is malformed (wire collision, bad register map...)."""


class BindingError(QSwitchError, KeyError):
    """An oracle label has no bound unitary."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unbound oracle"


class InversionError(QSwitchError):
    """The circuit contains gates with no available inverse."""


class ResourceLimitError(QSwitchError):
    """The request exceeds the desk-scale limits of the simulator."""
