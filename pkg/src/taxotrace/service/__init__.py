from .app import ServeConfig, ServeConfigError, create_app
from .store import AnnotationStore, StoreCorruptError

__all__ = [
    "AnnotationStore",
    "ServeConfig",
    "ServeConfigError",
    "StoreCorruptError",
    "create_app",
]
