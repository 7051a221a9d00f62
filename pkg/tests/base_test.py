"""Test holosim.base module functions."""

from fractions import Fraction

import pytest
import lxml.etree as ET
import xml_helpers.utils as h

from holosim.base import (hs_ns, report, _element, _subelement,
                          _rational_element)
from holosim.utils import HOLOSIM_NS


@pytest.mark.parametrize(('tag', 'prefix'), [
    ('holon', None),
    ('bound', 'middle'),
])
def test_hs_ns(tag, prefix):
    """Test the namespace usage."""
    new_ns = hs_ns(tag, prefix)
    if prefix:
        tag = prefix + tag[0].upper() + tag[1:]
    assert new_ns == f'{{{HOLOSIM_NS}}}{tag}'


def test_element():
    """
    Tests that the element is created in the holosim namespace with and
    without a prefix and that the namespace is serialized with the "hs"
    prefix.
    """
    elem1 = _element('holon')
    assert elem1.tag == '{urn:x-holosim:report:1}holon'
    assert ET.tostring(elem1) == ET.tostring(ET.fromstring(
        '<hs:holon xmlns:hs="urn:x-holosim:report:1"/>'))

    elem2 = _element('bound', 'middle')
    assert elem2.tag == '{urn:x-holosim:report:1}middleBound'


def test_subelement():
    """
    Tests that the subelement is appended to its parent and that it is
    the only child of the parent.
    """
    elem = _element('holarchy')
    subelem = _subelement(elem, 'holon')

    assert subelem.tag == '{urn:x-holosim:report:1}holon'
    assert subelem.getparent() == elem
    assert elem.xpath('./*')[0] == subelem
    assert len(elem) == 1
    assert ET.tostring(elem) == ET.tostring(ET.fromstring(
        '<hs:holarchy xmlns:hs="urn:x-holosim:report:1">'
        '<hs:holon/></hs:holarchy>'))


def test_rational_element():
    """
    Tests that a rational value keeps its numerator and denominator next
    to the decimal approximation, and that the element is appended to
    the parent when one is given.
    """
    elem1 = _rational_element('probability', Fraction(1, 24))
    xml = ('<hs:probability xmlns:hs="urn:x-holosim:report:1" '
           'decimal="%r"><hs:numerator>1</hs:numerator>'
           '<hs:denominator>24</hs:denominator></hs:probability>' % (1 / 24))
    assert h.compare_trees(elem1, ET.fromstring(xml))

    elem2 = _rational_element('arrangements', 6840)
    assert elem2.get('decimal') == '6840.0'
    assert elem2.xpath('./hs:denominator', namespaces={
        'hs': HOLOSIM_NS})[0].text == '1'

    parent = _element('parent')
    elem3 = _rational_element('probability', Fraction(2, 4), parent=parent)
    assert elem3.getparent().tag == '{urn:x-holosim:report:1}parent'
    assert elem3.xpath('./hs:numerator', namespaces={
        'hs': HOLOSIM_NS})[0].text == '1'


def test_report():
    """
    Tests that the report root element is created and that its children
    are sorted with the holarchy first.
    """
    report1 = report()
    assert report1.tag == '{urn:x-holosim:report:1}report'
    assert len(report1) == 0

    probability = _element('probability')
    holarchy = _element('holarchy')
    report2 = report(child_elements=[probability, holarchy])
    assert len(report2) == 2
    assert report2.xpath('./*')[0].tag == \
        '{urn:x-holosim:report:1}holarchy'
    assert report2.xpath('./*')[1].tag == \
        '{urn:x-holosim:report:1}probability'
