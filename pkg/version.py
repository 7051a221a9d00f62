"""
Gets the current version number of holosim.

Inside a git checkout the version is derived from the latest "v*" tag,
otherwise it is read from PKG-INFO, which is written with the package
__version__ when missing::

    from version import get_version

    setup(
        ...
        version=get_version(),
        ...
    )
"""

import os.path
import re
import subprocess

__all__ = ('get_version',)

VERSION_RE = re.compile('^Version: (.+)$', re.M)
INIT_VERSION_RE = re.compile(r"^__version__ = '([^']+)'$", re.M)

PROJECT_PATH = os.path.abspath(os.path.dirname(__file__))


def call_git_describe():
    """Return the "git describe" output for the latest version tag."""
    try:
        result = subprocess.run(
            ['git', 'describe', '--abbrev', '--tags', '--match', 'v[0-9]*'],
            cwd=PROJECT_PATH, capture_output=True, text=True, check=False)
    except OSError:
        return ''
    return result.stdout.strip()


def package_version():
    """Return __version__ of the holosim package."""
    with open(os.path.join(PROJECT_PATH, 'holosim', '__init__.py'),
              encoding='utf-8') as init:
        return INIT_VERSION_RE.search(init.read()).group(1)


def write_pkg_info():
    """Write package metadata PKG-INFO file"""
    path = os.path.join(PROJECT_PATH, 'PKG-INFO')
    if os.path.isfile(path):
        return
    with open(path, 'w', encoding='utf-8') as pkginfo:
        pkginfo.write("Metadata-Version: 1.0\n")
        pkginfo.write("Name: holosim\n")
        pkginfo.write("Version: %s\n" % package_version())
        pkginfo.write("Summary: Holon emergence in peer-to-peer fusion\n")


def get_version():
    """Determine version number for the project"""
    described = call_git_describe()
    if described:
        # v0.1-3-gabc123 -> 0.1.post3+gabc123
        parts = described.lstrip('v').split('-')
        if len(parts) >= 3:
            return '%s.post%s+%s' % (parts[0], parts[1], parts[2])
        return parts[0]

    write_pkg_info()
    with open(os.path.join(PROJECT_PATH, 'PKG-INFO'),
              encoding='utf-8') as pkginfo:
        return VERSION_RE.search(pkginfo.read()).group(1)


if __name__ == '__main__':
    print(get_version())
