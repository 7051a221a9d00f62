"""
Install holosim
"""

from setuptools import setup, find_packages
from version import get_version


def main():
    """Install holosim"""
    setup(
        name='holosim',
        packages=find_packages(exclude=['tests', 'tests.*']),
        include_package_data=True,
        package_data={'holosim': ['data/*.scn', 'data/*.csv']},
        version=get_version(),
        python_requires='>=3.9',
        install_requires=[
            'lxml',
            'numpy',
            'networkx'
        ],
        entry_points={
            'console_scripts': ['holosim=holosim.cli:main']
        }
    )


if __name__ == '__main__':
    main()
