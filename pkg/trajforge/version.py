"""
Copyright © 2024 trajforge developers.
"""
from importlib_metadata import metadata as _metadata, PackageNotFoundError

try:
    version = _metadata("trajforge")["version"]
except PackageNotFoundError:
    version = "0.0.0+local"
