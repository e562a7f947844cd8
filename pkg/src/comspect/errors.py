"""Exception hierarchy shared across the package."""


class ComspectError(Exception):
    """Base class for all package-specific failures."""


class SchemaError(ComspectError):
    """Input JSON does not match the expected schema (CLI exit code 2)."""


class NumericalError(ComspectError):
    """A numerical procedure failed to converge or lost accuracy (CLI exit code 3)."""


class EigensolverError(NumericalError):
    """Dense eigensolver did not converge; carries the matrix fingerprint."""

    def __init__(self, fingerprint: str, detail: str = ""):
        self.fingerprint = fingerprint
        msg = f"eigensolver failed to converge (matrix fingerprint {fingerprint})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
