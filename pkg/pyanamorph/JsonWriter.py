import json

import numpy as np

WRITE_FILE_IN_TEXT_MODE = True


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def write(document, f, settings=None):
    """Sidecar JSON: sorted keys, four space indent, trailing newline."""
    json.dump(_plain(document), f, indent=4, sort_keys=True)
    f.write("\n")
