from xml.etree.ElementTree import Element, ElementTree, SubElement

WRITE_FILE_IN_TEXT_MODE = False

NAME_SVG = "svg"
ATTR_VERSION = "version"
VALUE_SVG_VERSION = "1.1"
ATTR_XMLNS = "xmlns"
VALUE_XMLNS = "http://www.w3.org/2000/svg"
ATTR_WIDTH = "width"
ATTR_HEIGHT = "height"
ATTR_VIEWBOX = "viewBox"
ATTR_ID = "id"
NAME_GROUP = "g"
NAME_TITLE = "title"
NAME_POLYLINE = "polyline"
NAME_LINE = "line"
NAME_CIRCLE = "circle"
NAME_TEXT = "text"
ATTR_POINTS = "points"
ATTR_FILL = "fill"
ATTR_STROKE = "stroke"
ATTR_STROKE_WIDTH = "stroke-width"
ATTR_FONT_SIZE = "font-size"
VALUE_NONE = "none"
SCALE_BAR_ID = "scale-bar"


def number(value):
    """Six significant digits, no exponent noise such as -0."""
    text = "%.6g" % value
    if text == "-0":
        text = "0"
    return text


def _point_list(points):
    return " ".join(number(x) + "," + number(y) for x, y in points)


def _stroke(node, element):
    node.set(ATTR_FILL, element.get("fill", VALUE_NONE))
    node.set(ATTR_STROKE, element.get("stroke", VALUE_NONE))
    node.set(ATTR_STROKE_WIDTH, number(element.get("width", 0.3)))


def _add_element(group, element):
    kind = element["type"]
    if kind == "polyline":
        node = SubElement(group, NAME_POLYLINE)
        node.set(ATTR_POINTS, _point_list(element["points"]))
        _stroke(node, element)
    elif kind == "line":
        node = SubElement(group, NAME_LINE)
        (x1, y1), (x2, y2) = element["points"]
        node.set("x1", number(x1))
        node.set("y1", number(y1))
        node.set("x2", number(x2))
        node.set("y2", number(y2))
        _stroke(node, element)
    elif kind == "circle":
        node = SubElement(group, NAME_CIRCLE)
        (cx, cy), = element["points"]
        node.set("cx", number(cx))
        node.set("cy", number(cy))
        node.set("r", number(element["radius"]))
        _stroke(node, element)
    elif kind == "text":
        node = SubElement(group, NAME_TEXT)
        (x, y), = element["points"]
        node.set("x", number(x))
        node.set("y", number(y))
        node.set(ATTR_FONT_SIZE, number(element.get("size", 3.0)))
        node.set(ATTR_FILL, element.get("fill", "#000000"))
        node.text = element["text"]
    else:
        raise ValueError("unknown svg element %r" % kind)


def create_svg_dom(figure):
    figure.validate()
    root = Element(NAME_SVG)
    root.set(ATTR_VERSION, VALUE_SVG_VERSION)
    root.set(ATTR_XMLNS, VALUE_XMLNS)
    root.set(ATTR_WIDTH, number(figure.width_mm) + "mm")
    root.set(ATTR_HEIGHT, number(figure.height_mm) + "mm")
    root.set(
        ATTR_VIEWBOX,
        "0 0 " + number(figure.width_mm) + " " + number(figure.height_mm),
    )
    if figure.title:
        title = SubElement(root, NAME_TITLE)
        title.text = figure.title
    for name, elements in figure.layers:
        group = SubElement(root, NAME_GROUP)
        group.set(ATTR_ID, name)
        for element in elements:
            _add_element(group, element)
    bar = SubElement(root, NAME_GROUP)
    bar.set(ATTR_ID, SCALE_BAR_ID)
    for element in figure.scale_bar_elements():
        _add_element(bar, element)
    return ElementTree(root)


def write(figure, f, settings=None):
    """Writes an SVG 1.1 document of the figure's layers and scale bar."""
    tree = create_svg_dom(figure)
    tree.write(f, encoding="utf-8", xml_declaration=True)
