"""
Functions for generating holosim reports (holon forests, holon
timelines and probability evaluations) as lxml element trees.

References:

    * lxml.etree https://lxml.de/tutorial.html
    * Namespaces in XML https://www.w3.org/TR/xml-names/

"""

import lxml.etree as ET
from holosim.utils import HOLOSIM_NS, NAMESPACES, report_root_order

__all__ = ['hs_ns', 'report']


def hs_ns(tag, prefix=""):
    """Prefix ElementTree tags with the holosim namespace.

    holon -> {urn:x-holosim:report:1}holon

    The prefix parameter changes the first letter of the tag to
    uppercase and prepends the prefix::

        element = _element('bound', 'middle')
        element.tag
        '{urn:x-holosim:report:1}middleBound'

    :tag: The tag name as string
    :prefix: Prefix for the tag (default="")
    :returns: Tag name with the namespace and prefix

    """
    if prefix:
        tag = tag[0].upper() + tag[1:]
        return f'{{{HOLOSIM_NS}}}{prefix}{tag}'
    return f'{{{HOLOSIM_NS}}}{tag}'


def _element(tag, prefix="", namespaces=None):
    """Return lxml Element in the holosim namespace.

    :tag: Tagname
    :prefix: Prefix for the tag (default="")
    :namespaces: The namespaces and their prefixes as a dict
    :returns: ElementTree element object

    """
    if namespaces is None:
        namespaces = {}
    namespaces['hs'] = HOLOSIM_NS
    return ET.Element(hs_ns(tag, prefix), nsmap=namespaces)


def _subelement(parent, tag, prefix="", namespaces=None):
    """Return subelement for the given parent element. Created element
    is appended to parent element.

    :parent: Parent element
    :tag: Element tagname
    :prefix: Prefix for the tag
    :namespaces: The namespaces and their prefixes as a dict
    :returns: Created subelement

    """
    if namespaces is None:
        namespaces = {}
    namespaces['hs'] = HOLOSIM_NS
    return ET.SubElement(parent, hs_ns(tag, prefix), nsmap=namespaces)


def _rational_element(tag, value, parent=None):
    """Return an exact rational value as an element. If parent element
    is given, the element is created as its subelement.

    Returns the following ElementTree structure::

        <hs:{{ tag }} decimal="0.04166666666666666">
          <hs:numerator>1</hs:numerator>
          <hs:denominator>24</hs:denominator>
        </hs:{{ tag }}>

    :tag: Element tag name
    :value: fractions.Fraction or int
    :parent: Parent element

    """
    if parent is not None:
        elem = _subelement(parent, tag)
    else:
        elem = _element(tag)
    elem.set('decimal', repr(float(value)))
    numerator_el = _subelement(elem, 'numerator')
    numerator_el.text = str(value.numerator)
    denominator_el = _subelement(elem, 'denominator')
    denominator_el.text = str(value.denominator)

    return elem


def report(child_elements=None, namespaces=None):
    """Create the holosim report root element.

    :child_elements: Any elements appended to the report

    Returns the following ElementTree structure::

        <hs:report xmlns:hs="urn:x-holosim:report:1"/>

    """
    if namespaces is None:
        namespaces = dict(NAMESPACES)

    _report = _element('report', namespaces=namespaces)

    if child_elements:
        child_elements.sort(key=report_root_order)
        for element in child_elements:
            _report.append(element)

    return _report
