import logging
import time
from hashlib import sha256

log = logging.getLogger(__name__)

def timeFormatter(seconds, label="Total time"):
    """Formats elapsed time to be more intuitive when logging.

    Args:
        seconds (float): elapsed time.
        label (str, optional): prefix for the message. Defaults to "Total time".

    Returns:
        str: the formatted message (also logged at INFO).
    """
    if seconds < 60:
        message = "%s: %.1f seconds" % (label, seconds)
    else:
        message = time.strftime(label + " (HH:MM:SS) = %H:%M:%S", time.gmtime(seconds))
    log.info(message)
    return message

def contentHash(text):
    """Returns a truncated hash of some text, used to fingerprint artifacts.

    Args:
        text (str): the text to fingerprint.

    Returns:
        str: 16-character truncated sha256 hex digest.
    """
    hasher = sha256()
    hasher.update(str(text).encode())
    return hasher.hexdigest()[:16]
