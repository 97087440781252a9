"""Exception types shared across the package."""


class ReplicaError(Exception):
    """Base class for errors raised by brownian_replica."""


class SizeError(ReplicaError, ValueError):
    """Operands live on different replica counts or have the wrong length."""


class DomainError(ReplicaError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class ResourceError(ReplicaError, MemoryError):
    """A dense object would exceed the configured memory budget."""


class ConsistencyError(ReplicaError, RuntimeError):
    """An internal invariant failed (e.g. a category basis is not closed)."""
