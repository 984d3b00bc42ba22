def write_string(stream, string, encoding="utf8"):
    stream.write(string.encode(encoding))


def write_string_utf8(stream, string):
    write_string(stream, string, "utf8")


def format_number(value, digits=12):
    """Shortest %g form; integers and strings pass through unchanged."""
    if isinstance(value, bool) or isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.*g" % (digits, value)
    try:
        return "%.*g" % (digits, float(value))
    except (TypeError, ValueError):
        return str(value)
