import logging
import os
from pathlib import Path
from typing import Generic, Type, TypeVar, Union

from pydantic import BaseModel

logger = logging.getLogger(__name__)

ModelType = TypeVar("ModelType", bound=BaseModel)
PathLike = Union[str, os.PathLike]


def io_error(e: OSError, action: str, path: PathLike) -> OSError:
    """Same errno (and so the same OSError subclass) with the path in the message"""
    return OSError(e.errno, f"Cannot {action}: {e.strerror}", str(path))


class FileStoreBase(Generic[ModelType]):
    def __init__(self, model: Type[ModelType]):
        """
        File store with default methods to write and read text and JSON records.

        **Parameters**

        * `model`: A Pydantic model (schema) class describing the JSON records
        """
        self.model = model

    def write_text(self, path: PathLike, text: str) -> Path:
        """Write a text file, creating parent directories"""
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Failed to write {target}: {e}")
            raise io_error(e, "write file", target) from e
        return target

    def read_text(self, path: PathLike) -> str:
        target = Path(path)
        try:
            return target.read_text(encoding="utf-8")
        except OSError as e:
            raise io_error(e, "read file", target) from e

    def write_model(self, path: PathLike, obj: ModelType) -> Path:
        """Write a record as JSON"""
        return self.write_text(path, obj.model_dump_json(indent=2) + "\n")

    def read_model(self, path: PathLike) -> ModelType:
        """Read a record written by write_model"""
        return self.model.model_validate_json(self.read_text(path))
