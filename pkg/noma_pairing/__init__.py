from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

_version_file = Path(__file__).resolve().parent.parent / 'VERSION'

if _version_file.exists():
    __version__ = _version_file.read_text().strip()
else:
    try:
        __version__ = version('noma-pairing')
    except PackageNotFoundError:
        __version__ = '0.0.0'
