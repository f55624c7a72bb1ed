'''test_style.py
================

Purpose
-------

This script runs pycodestyle on all code in this repository.

This script is best run within pytest::

   pytest tests/test_style.py

'''
import glob
import os

import pycodestyle
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# DIRECTORIES to examine
EXPRESSIONS = (
    ('FirstLevel', 'thermokit/*.py'),
    ('SecondLevel', 'thermokit/tools/*.py'),
    ('Tests', 'tests/*.py'))

# Codes to ignore in the pycodestyle BaseReport
IGNORE = set(('E101',  # indentation contains mixed spaces and tabs
              'E201',  # whitespace after '('
              'E202',  # whitespace before ')'
              'E122',  # continuation line missing indentation or outdented
              'E126',  # continuation line over-indented for hanging indent
              'E127',  # continuation line over-indented for visual indent
              'E128',  # continuation line under-indented for visual indent
              'E131',  # continuation line unaligned for hanging indent
              'E265',  # block comment should start with '# '
              'E501',  # line too long (82 > 79 characters)
              'E502',  # the backslash is redundant between brackets
              'E731',  # do not assign a lambda expression, use a def
              'E741',  # ambiguous variable name
              'W191',
              'W291',
              'W293',
              'W391',
              'W503',  # line break before binary operator
              'W504',  # line break after binary operator
              'W601',
              'W602',
              'files',
              'directories',
              'physical lines',
              'logical lines',))


def collect_files():
    files = []
    for label, expression in EXPRESSIONS:
        files.extend(sorted(f for f in glob.glob(os.path.join(ROOT, expression))
                            if not os.path.isdir(f)))
    return files


@pytest.mark.parametrize("filename", collect_files())
def test_style(filename):
    '''check style of filename.
    '''

    p = pycodestyle.StyleGuide(quiet=True)
    report = p.check_files([filename])

    # count errors/warning excluding
    # those to ignore
    found = ['%s:%i' % (x, y) for x, y
             in list(report.counters.items()) if x not in IGNORE]
    assert not found, 'pycodestyle style violations: %s' % ','.join(found)
