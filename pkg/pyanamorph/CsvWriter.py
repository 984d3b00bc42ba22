from .WriteHelper import format_number, write_string_utf8

WRITE_FILE_IN_TEXT_MODE = False
LINE_END = "\r\n"


class Table:
    """Header plus rows, the unit of CSV output."""

    def __init__(self, header, rows=None):
        self.header = tuple(header)
        self.rows = [] if rows is None else list(rows)

    def __len__(self):
        return len(self.rows)

    def add_row(self, *values):
        if len(values) != len(self.header):
            raise ValueError(
                "row has %d fields, header has %d" % (len(values), len(self.header))
            )
        self.rows.append(values)

    def column(self, name):
        index = self.header.index(name)
        return [row[index] for row in self.rows]


def csv(f, values):
    string = ""
    for v in values:
        if len(string) > 0:
            string += ","
        string += '"%s"' % format_number(v).replace('"', '""')
    write_string_utf8(f, string + LINE_END)


def write(table, f, settings=None):
    csv(f, table.header)
    for row in table.rows:
        csv(f, row)
