class ValidationError(ValueError):
    """Bad input or violated contract; the CLI maps this to exit code 2."""
