class ValidationError(ValueError):
    """An object violates a structural invariant (unitarity, state validity, ...)."""
