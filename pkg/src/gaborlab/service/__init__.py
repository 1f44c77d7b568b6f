from .app import create_app
from .schemas import SCHEMA_VERSION, Envelope

__all__ = ["create_app", "Envelope", "SCHEMA_VERSION"]
