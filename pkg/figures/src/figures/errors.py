"""Error type for unusable inputs.

Every message names the offending file or field, because the command line
maps these to a nonzero exit with that message on stderr.
"""


class InputError(Exception):
    """Missing, malformed, or schema-violating input file."""
