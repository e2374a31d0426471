from . import ops, schemas  # noqa: F401
